"""Core data model for contract-based specification structures.

A specification structure describes a component tree, the assume-guarantee
contracts allocated to the components, and the refinement relations through
which assumptions are discharged. Everything here is an immutable value
object and every operation is a pure function, so values can be shared
freely across threads or processes.

Cross-reference resolution and well-formedness are *not* enforced at
construction time; that is the job of :mod:`contractcase.validator`. The
constructors only check local shape (identifier syntax, non-empty texts,
one guarantee per contract).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ModelError(Exception):
    """Base class for model-level failures."""


class UnknownIdentifierError(ModelError):
    """An identifier does not name any declared element."""


class MultipleOwnersError(ModelError):
    """A specification id is claimed by more than one contract (a W3 situation)."""


class UnresolvedReferenceError(ModelError):
    """A cross-reference does not resolve."""

    def __init__(self, identifier: str, site: str):
        super().__init__(f"{site} references unknown identifier '{identifier}'")
        self.identifier = identifier
        self.site = site


def check_identifier(token: str, what: str = "identifier") -> str:
    """Return *token* if it is a legal identifier, else raise ModelError.

    Identifiers are case-sensitive, nonempty, and match
    ``[A-Za-z_][A-Za-z0-9_]*``.
    """
    if not isinstance(token, str) or not _IDENT_RE.match(token):
        raise ModelError(f"invalid {what}: {token!r}")
    return token


class SpecKind(Enum):
    ASSUMPTION = "assumption"
    GUARANTEE = "guarantee"


class EdgeKind(Enum):
    ASSUMPTION_OF = "a"
    REFINEMENT_OF = "r"


class DependencyKind(Enum):
    """The three legal shapes of a refinement, plus the catch-all."""

    PARENT_ASSUMPTION_TO_CHILD_ASSUMPTION = "parent-assumption-to-child-assumption"
    SIBLING_GUARANTEE_TO_SIBLING_ASSUMPTION = "sibling-guarantee-to-sibling-assumption"
    CHILD_GUARANTEE_TO_PARENT_ASSUMPTION = "child-guarantee-to-parent-assumption"
    ILLEGAL = "illegal"


@dataclass(frozen=True)
class Specification:
    """A single assumption or guarantee: an opaque natural-language statement.

    The model attaches no semantics to the text; entailment between
    specifications is argued by humans, never computed here.
    """

    id: str
    kind: SpecKind
    text: str

    def __post_init__(self) -> None:
        check_identifier(self.id, "specification id")
        if not isinstance(self.kind, SpecKind):
            raise ModelError(f"specification {self.id}: kind must be a SpecKind")
        if not self.text:
            raise ModelError(f"specification {self.id}: text must be nonempty")


@dataclass(frozen=True)
class Contract:
    """An assume-guarantee pair allocated to a component.

    A contract has exactly one guarantee; a component offering several
    guarantees carries several contracts. Assumption order is declaration
    order and is semantically irrelevant (it only stabilizes output).
    """

    id: str
    component: str
    assumptions: tuple[Specification, ...]
    guarantee: Specification

    def __post_init__(self) -> None:
        check_identifier(self.id, "contract id")
        check_identifier(self.component, "component reference")
        object.__setattr__(self, "assumptions", tuple(self.assumptions))
        seen: set[str] = set()
        for spec in self.assumptions:
            if spec.kind is not SpecKind.ASSUMPTION:
                raise ModelError(f"contract {self.id}: {spec.id} is not an assumption")
            if spec.id in seen:
                raise ModelError(f"contract {self.id}: duplicate assumption id {spec.id}")
            seen.add(spec.id)
        if self.guarantee.kind is not SpecKind.GUARANTEE:
            raise ModelError(f"contract {self.id}: {self.guarantee.id} is not a guarantee")

    @property
    def specifications(self) -> tuple[Specification, ...]:
        return self.assumptions + (self.guarantee,)


@dataclass(frozen=True)
class Component:
    """A node in the component tree.

    ``parent`` is None for the root. Everything outside a component is its
    environment; the root's environment is not modeled as a component, so
    root-level assumptions may legitimately stay undischarged.
    """

    id: str
    parent: str | None = None
    name: str = ""
    description: str = ""

    def __post_init__(self) -> None:
        check_identifier(self.id, "component id")
        if self.parent is not None:
            check_identifier(self.parent, "parent reference")

    @property
    def display_name(self) -> str:
        return self.name or self.id


@dataclass(frozen=True)
class Refinement:
    """States that satisfying ``source`` lets one take ``target`` as satisfied.

    The arrow runs from the independent specification to the dependent one.
    After validation, ``target`` is always an assumption.
    """

    id: str
    source: str
    target: str

    def __post_init__(self) -> None:
        check_identifier(self.id, "refinement id")
        check_identifier(self.source, "refinement source")
        check_identifier(self.target, "refinement target")
        if self.source == self.target:
            raise ModelError(f"refinement {self.id}: source and target must differ")


@dataclass(frozen=True)
class Concern:
    """Tags a named cross-cutting concern onto a set of guarantees."""

    name: str
    covers: tuple[str, ...]

    def __post_init__(self) -> None:
        check_identifier(self.name, "concern name")
        deduped: list[str] = []
        for spec_id in self.covers:
            check_identifier(spec_id, "covered guarantee")
            if spec_id not in deduped:
                deduped.append(spec_id)
        object.__setattr__(self, "covers", tuple(deduped))


@dataclass(frozen=True)
class SpecificationStructure:
    """The complete input artifact: components, contracts, refinements, concerns."""

    components: tuple[Component, ...] = ()
    contracts: tuple[Contract, ...] = ()
    refinements: tuple[Refinement, ...] = ()
    concerns: tuple[Concern, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "contracts", tuple(self.contracts))
        object.__setattr__(self, "refinements", tuple(self.refinements))
        object.__setattr__(self, "concerns", tuple(self.concerns))

    def component_map(self) -> dict[str, Component]:
        return {c.id: c for c in self.components}

    def contract_map(self) -> dict[str, Contract]:
        return {k.id: k for k in self.contracts}

    def refinement_map(self) -> dict[str, Refinement]:
        return {r.id: r for r in self.refinements}

    def concern_map(self) -> dict[str, frozenset[str]]:
        return {c.name: frozenset(c.covers) for c in self.concerns}

    def specifications(self) -> dict[str, Specification]:
        """All declared specifications by id (later duplicates win; W1/W3 report them)."""
        specs: dict[str, Specification] = {}
        for contract in self.contracts:
            for spec in contract.specifications:
                specs[spec.id] = spec
        return specs

    def contracts_of(self, component_id: str) -> tuple[Contract, ...]:
        return tuple(k for k in self.contracts if k.component == component_id)

    def roots(self) -> tuple[Component, ...]:
        known = {c.id for c in self.components}
        return tuple(c for c in self.components if c.parent is None or c.parent not in known)

    def children_of(self, component_id: str) -> tuple[Component, ...]:
        return tuple(c for c in self.components if c.parent == component_id)

    def preorder(self) -> tuple[Component, ...]:
        """Components in tree preorder, siblings in declaration order.

        Components stuck in a parent cycle are appended in declaration
        order so the traversal is total even on ill-formed input.
        """
        out: list[Component] = []
        seen: set[str] = set()

        def visit(comp: Component) -> None:
            if comp.id in seen:
                return
            seen.add(comp.id)
            out.append(comp)
            for child in self.children_of(comp.id):
                visit(child)

        for root in self.roots():
            visit(root)
        for comp in self.components:
            if comp.id not in seen:
                seen.add(comp.id)
                out.append(comp)
        return tuple(out)


@dataclass(frozen=True, order=True)
class Edge:
    source: str
    target: str
    kind: EdgeKind = field(compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.kind, EdgeKind):
            raise ModelError("edge kind must be an EdgeKind")


@dataclass(frozen=True)
class SpecGraph:
    """The specification graph: one node per specification, a-edges and r-edges."""

    nodes: frozenset[str]
    edges: frozenset[Edge]

    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges, key=lambda e: (e.source, e.target, e.kind.value)))

    def edges_of_kind(self, kind: EdgeKind) -> tuple[Edge, ...]:
        return tuple(e for e in self.sorted_edges() if e.kind is kind)

    def successors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for edge in self.sorted_edges():
            adj[edge.source].append(edge.target)
        return adj

    def predecessors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for edge in self.sorted_edges():
            adj[edge.target].append(edge.source)
        return adj


def unresolved_references(structure: SpecificationStructure) -> list[tuple[str, str]]:
    """All dangling cross-references as (identifier, use site) pairs.

    A concern entry must name a declared *guarantee*; naming an assumption
    counts as unresolved here because concerns attach to guarantees only.
    """
    components = {c.id for c in structure.components}
    specs = structure.specifications()
    out: list[tuple[str, str]] = []
    for comp in structure.components:
        if comp.parent is not None and comp.parent not in components:
            out.append((comp.parent, f"component {comp.id} parent"))
    for contract in structure.contracts:
        if contract.component not in components:
            out.append((contract.component, f"contract {contract.id} owner"))
    for ref in structure.refinements:
        if ref.source not in specs:
            out.append((ref.source, f"refinement {ref.id} source"))
        if ref.target not in specs:
            out.append((ref.target, f"refinement {ref.id} target"))
    for concern in structure.concerns:
        for spec_id in concern.covers:
            spec = specs.get(spec_id)
            if spec is None:
                out.append((spec_id, f"concern {concern.name}"))
            elif spec.kind is not SpecKind.GUARANTEE:
                out.append((spec_id, f"concern {concern.name} (not a guarantee)"))
    return out


def build_graph(structure: SpecificationStructure) -> SpecGraph:
    """Derive the specification graph from a structure.

    Emits one assumption-of edge per (assumption, guarantee) pair inside
    each contract, and one refinement-of edge per refinement; nothing else.
    Requires all refinement endpoints to resolve.
    """
    specs = structure.specifications()
    edges: set[Edge] = set()
    for contract in structure.contracts:
        for assumption in contract.assumptions:
            edges.add(Edge(assumption.id, contract.guarantee.id, EdgeKind.ASSUMPTION_OF))
    for ref in structure.refinements:
        if ref.source not in specs:
            raise UnresolvedReferenceError(ref.source, f"refinement {ref.id} source")
        if ref.target not in specs:
            raise UnresolvedReferenceError(ref.target, f"refinement {ref.id} target")
        edges.add(Edge(ref.source, ref.target, EdgeKind.REFINEMENT_OF))
    return SpecGraph(nodes=frozenset(specs), edges=frozenset(edges))


def owner_of(structure: SpecificationStructure, spec_id: str) -> tuple[str, str]:
    """The (contract id, component id) owning a specification.

    Total on declared specification ids whenever each id is used by exactly
    one contract; multiple owners raise MultipleOwnersError (a W3 finding).
    """
    owners = [
        (contract.id, contract.component)
        for contract in structure.contracts
        if any(spec.id == spec_id for spec in contract.specifications)
    ]
    if not owners:
        raise UnknownIdentifierError(f"unknown specification id '{spec_id}'")
    if len(owners) > 1:
        names = ", ".join(sorted(c for c, _ in owners))
        raise MultipleOwnersError(f"specification '{spec_id}' is owned by multiple contracts: {names}")
    return owners[0]


def dependency_kind(structure: SpecificationStructure, refinement: Refinement) -> DependencyKind:
    """Classify a refinement against the three legal dependency shapes.

    Legality is purely local: "child" means direct child and "sibling"
    means same direct parent. Level-skipping refinements are Illegal.
    """
    specs = structure.specifications()
    components = structure.component_map()
    _, source_owner = owner_of(structure, refinement.source)
    _, target_owner = owner_of(structure, refinement.target)
    source_kind = specs[refinement.source].kind
    target_kind = specs[refinement.target].kind
    if target_kind is not SpecKind.ASSUMPTION or source_owner == target_owner:
        return DependencyKind.ILLEGAL
    source_parent = components[source_owner].parent if source_owner in components else None
    target_parent = components[target_owner].parent if target_owner in components else None
    if source_kind is SpecKind.ASSUMPTION and target_parent == source_owner:
        return DependencyKind.PARENT_ASSUMPTION_TO_CHILD_ASSUMPTION
    if source_kind is SpecKind.GUARANTEE:
        if source_parent is not None and source_parent == target_parent:
            return DependencyKind.SIBLING_GUARANTEE_TO_SIBLING_ASSUMPTION
        if source_parent == target_owner:
            return DependencyKind.CHILD_GUARANTEE_TO_PARENT_ASSUMPTION
    return DependencyKind.ILLEGAL


def _spec_bytes(spec: Specification) -> bytes:
    return b"spec\0" + spec.id.encode() + b"\0" + spec.kind.value.encode() + b"\0" + spec.text.encode() + b"\0"


def spec_content_hash(spec: Specification) -> str:
    """Digest of a single specification (id, kind, and text)."""
    return hashlib.sha256(_spec_bytes(spec)).hexdigest()


def content_hash(
    element: Contract | Refinement | Component,
    structure: SpecificationStructure | None = None,
) -> str:
    """Deterministic sha256 digest over an element's full content.

    Referenced specification texts are folded in, so any text edit changes
    the digest. Refinements need the containing ``structure`` to resolve
    their endpoints. Contract assumptions are digested sorted by id, making
    the hash insensitive to declaration-order shuffles (which are
    semantically irrelevant).
    """
    h = hashlib.sha256()
    if isinstance(element, Contract):
        h.update(b"contract\0" + element.id.encode() + b"\0" + element.component.encode() + b"\0")
        for spec in sorted(element.assumptions, key=lambda s: s.id):
            h.update(_spec_bytes(spec))
        h.update(b"guarantee\0")
        h.update(_spec_bytes(element.guarantee))
    elif isinstance(element, Refinement):
        if structure is None:
            raise ModelError("content_hash of a refinement needs the containing structure")
        specs = structure.specifications()
        for end, site in ((element.source, "source"), (element.target, "target")):
            if end not in specs:
                raise UnresolvedReferenceError(end, f"refinement {element.id} {site}")
        h.update(b"refinement\0" + element.id.encode() + b"\0")
        h.update(_spec_bytes(specs[element.source]))
        h.update(_spec_bytes(specs[element.target]))
    elif isinstance(element, Component):
        h.update(b"component\0" + element.id.encode() + b"\0")
        h.update((element.parent or "").encode() + b"\0")
        h.update(element.name.encode() + b"\0" + element.description.encode() + b"\0")
    else:
        raise ModelError(f"content_hash: unsupported element {type(element).__name__}")
    return h.hexdigest()


def structures_equivalent(a: SpecificationStructure, b: SpecificationStructure) -> bool:
    """Content equality, ignoring declaration order of top-level elements.

    Assumption order inside a contract is preserved content; concern
    cover sets are compared as sets.
    """

    def comp_key(s: SpecificationStructure):
        return {c.id: (c.parent, c.name, c.description) for c in s.components}

    def contract_key(s: SpecificationStructure):
        return {
            k.id: (
                k.component,
                tuple((sp.id, sp.text) for sp in k.assumptions),
                (k.guarantee.id, k.guarantee.text),
            )
            for k in s.contracts
        }

    def refinement_key(s: SpecificationStructure):
        return {r.id: (r.source, r.target) for r in s.refinements}

    return (
        comp_key(a) == comp_key(b)
        and contract_key(a) == contract_key(b)
        and refinement_key(a) == refinement_key(b)
        and a.concern_map() == b.concern_map()
    )
