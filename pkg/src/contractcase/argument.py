"""The assurance case: architecture plus argumentation, and claim-status evaluation.

A case is an immutable value; every edit returns a new case, which lets
change-impact analysis diff snapshots. Cross-module links are exclusively
the architecture's bindings; argument fragments never reach across module
boundaries.

Claim status is four-valued:

  Unsupported  no support, or support resting on something unsupported
  Undefined    support present but an inference lacks a justification
  Assumed      declared environmental (axiom); root-module premises only
  Supported    evidence-backed and fully justified

Assumed premises count as satisfied during propagation but are reported
separately rather than folded into Supported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

from . import graphs
from .architect import (
    ArgumentNode,
    AssuranceArchitecture,
    Binding,
    ClaimRef,
    ComponentModule,
    Inference,
    NodeKind,
    RefinementModule,
    derive_architecture,
    instantiate_component_template,
    instantiate_refinement_template,
)
from .dsl import SCHEMA_VERSION, check_schema_version, structure_from_dict, structure_to_dict
from .model import SpecificationStructure


class CaseError(Exception):
    """An edit or query violated the case's construction rules."""


class ClaimStatus(Enum):
    UNSUPPORTED = "Unsupported"
    UNDEFINED = "Undefined"
    ASSUMED = "Assumed"
    SUPPORTED = "Supported"


# Unsupported < Undefined < Supported; Assumed sits outside the order.
_STATUS_RANK = {ClaimStatus.UNSUPPORTED: 0, ClaimStatus.UNDEFINED: 1, ClaimStatus.SUPPORTED: 2}


def status_at_most(a: ClaimStatus, b: ClaimStatus) -> bool:
    """True when a <= b in the support order (Assumed only compares to itself)."""
    if ClaimStatus.ASSUMED in (a, b):
        return a is b
    return _STATUS_RANK[a] <= _STATUS_RANK[b]


@dataclass(frozen=True)
class AssuranceCase:
    structure: SpecificationStructure
    architecture: AssuranceArchitecture
    nodes: tuple[ArgumentNode, ...]
    inferences: tuple[Inference, ...]
    axioms: frozenset[str] = frozenset()

    @property
    def bindings(self) -> tuple[Binding, ...]:
        return self.architecture.bindings

    def node_map(self) -> dict[str, ArgumentNode]:
        return {n.id: n for n in self.nodes}

    def node(self, node_id: str) -> ArgumentNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise CaseError(f"unknown node '{node_id}'")

    def claims(self) -> tuple[ArgumentNode, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.CLAIM)

    def module_nodes(self, module_id: str) -> tuple[ArgumentNode, ...]:
        return tuple(n for n in self.nodes if n.module == module_id)

    def inference_concluding(self, claim_id_: str) -> Inference | None:
        for inf in self.inferences:
            if inf.conclusion == claim_id_:
                return inf
        return None

    def evidence_for(self, claim_id_: str) -> tuple[ArgumentNode, ...]:
        return tuple(
            n for n in self.nodes if n.kind is NodeKind.EVIDENCE and n.supports == claim_id_
        )

    def claim_spec_map(self) -> dict[str, str]:
        """Interface claim id -> specification id, across all modules."""
        out: dict[str, str] = {}
        for module in self.architecture.component_modules:
            for ref in module.interface_premises + module.interface_conclusions:
                out[ref.claim] = ref.spec
        for module in self.architecture.refinement_modules:
            out[module.premise_claim] = module.premise_spec
            out[module.conclusion_claim] = module.conclusion_spec
        return out


def build_case(structure: SpecificationStructure, mode: str = "strict") -> AssuranceCase:
    """Compile a structure into a fresh case: architecture plus empty templates."""
    architecture = derive_architecture(structure, mode)
    nodes: list[ArgumentNode] = []
    inferences: list[Inference] = []
    for module in architecture.component_modules:
        template = instantiate_component_template(architecture, module, structure)
        nodes.extend(template.nodes)
        inferences.extend(template.inferences)
    for module in architecture.refinement_modules:
        template = instantiate_refinement_template(architecture, module, structure)
        nodes.extend(template.nodes)
        inferences.extend(template.inferences)
    return AssuranceCase(
        structure=structure,
        architecture=architecture,
        nodes=tuple(nodes),
        inferences=tuple(inferences),
    )


def _module_claim_edges(inferences: list[Inference]) -> list[tuple[str, str]]:
    return [(p, inf.conclusion) for inf in inferences for p in inf.premises]


def attach_fragment(
    case: AssuranceCase,
    module_id: str,
    nodes: list[ArgumentNode] | tuple[ArgumentNode, ...],
    inferences: list[Inference] | tuple[Inference, ...] = (),
) -> AssuranceCase:
    """Attach argumentation to one module, returning a new case.

    New nodes must live in ``module_id`` and all inference endpoints must
    resolve inside it (bindings are the only cross-module links). A new
    inference may conclude a claim currently held by an undeveloped
    placeholder strategy (the placeholder inference and its placeholder
    strategy/justification are then replaced), but attaching a second
    inference to a claim with developed support is an error, as is any
    edit that would make the module's inference graph cyclic.
    """
    case.architecture.find(module_id)
    node_map = case.node_map()
    incoming = list(nodes)
    new_ids = set()
    for node in incoming:
        if node.module != module_id:
            raise CaseError(
                f"node {node.id} targets module {node.module}; fragment is for {module_id}"
            )
        if node.id in new_ids:
            raise CaseError(f"fragment declares node {node.id} twice")
        new_ids.add(node.id)

    incoming_conclusions = [inf.conclusion for inf in inferences]
    for conclusion in incoming_conclusions:
        if incoming_conclusions.count(conclusion) > 1:
            raise CaseError(f"fragment attaches two inferences concluding {conclusion}")

    removed: set[str] = set()
    kept_inferences = list(case.inferences)
    for inf in inferences:
        existing = next((i for i in kept_inferences if i.conclusion == inf.conclusion), None)
        if existing is not None:
            strategy = node_map[existing.strategy]
            if strategy.developed:
                raise CaseError(
                    f"claim {inf.conclusion} already has developed support; "
                    "cannot attach a second inference"
                )
            kept_inferences.remove(existing)
            removed.add(existing.strategy)
            if existing.justification is not None:
                removed.add(existing.justification)

    surviving = {n.id: n for n in case.nodes if n.id not in removed}
    for node in incoming:
        if node.id in surviving:
            raise CaseError(f"node id {node.id} already exists in the case")
    combined = dict(surviving)
    combined.update({n.id: n for n in incoming})

    def require(node_id: str, kinds: tuple[NodeKind, ...], role: str) -> ArgumentNode:
        node = combined.get(node_id)
        if node is None:
            raise CaseError(f"{role} '{node_id}' does not exist in the fragment or the case")
        if node.module != module_id:
            raise CaseError(f"{role} '{node_id}' lives in module {node.module}; "
                            "cross-module edges are not allowed")
        if node.kind not in kinds:
            raise CaseError(f"{role} '{node_id}' must be one of {[k.value for k in kinds]}")
        return node

    for node in incoming:
        if node.kind is NodeKind.EVIDENCE:
            require(node.supports, (NodeKind.CLAIM,), "evidence target")

    used_strategies = {i.strategy for i in kept_inferences}
    used_justifications = {i.justification for i in kept_inferences if i.justification}
    for inf in inferences:
        require(inf.conclusion, (NodeKind.CLAIM,), "conclusion")
        for premise in inf.premises:
            require(premise, (NodeKind.CLAIM,), "premise")
        require(inf.strategy, (NodeKind.STRATEGY,), "strategy")
        if inf.strategy in used_strategies:
            raise CaseError(f"strategy {inf.strategy} already drives another inference")
        used_strategies.add(inf.strategy)
        if inf.justification is not None:
            require(inf.justification, (NodeKind.JUSTIFICATION,), "justification")
            if inf.justification in used_justifications:
                raise CaseError(f"justification {inf.justification} already serves another inference")
            used_justifications.add(inf.justification)
        for ctx in inf.contexts:
            require(ctx, (NodeKind.CONTEXT,), "context")

    all_inferences = kept_inferences + list(inferences)
    module_infs = [
        i for i in all_inferences if combined[i.conclusion].module == module_id
    ]
    module_claims = [n.id for n in combined.values()
                     if n.module == module_id and n.kind is NodeKind.CLAIM]
    cycle = graphs.find_cycle(module_claims, _module_claim_edges(module_infs))
    if cycle is not None:
        raise CaseError(f"fragment would create an inference cycle: {' -> '.join(cycle)}")

    new_nodes = tuple(n for n in case.nodes if n.id not in removed) + tuple(incoming)
    return replace(case, nodes=new_nodes, inferences=tuple(all_inferences))


def _root_module(case: AssuranceCase) -> ComponentModule:
    roots = case.structure.roots()
    if len(roots) != 1:
        raise CaseError("case structure does not have a unique root component")
    for module in case.architecture.component_modules:
        if module.component == roots[0].id:
            return module
    raise CaseError(f"root component {roots[0].id} has no assurance module")


def declare_axiom(case: AssuranceCase, claim: str) -> AssuranceCase:
    """Declare a root-module interface premise environmental.

    Only premises of the root component's module that no binding discharges
    may be assumed; anything bound must be argued through its refinement
    module instead.
    """
    node = case.node(claim)
    if node.kind is not NodeKind.CLAIM:
        raise CaseError(f"axiom '{claim}' is not a claim")
    root = _root_module(case)
    if claim not in {ref.claim for ref in root.interface_premises}:
        raise CaseError(
            f"axiom '{claim}' must be an interface premise of the root module {root.id}"
        )
    for binding in case.bindings:
        if binding.to_claim == claim:
            raise CaseError(
                f"claim '{claim}' is discharged by a binding from {binding.from_module}; "
                "argue it through the refinement module instead of assuming it"
            )
    return replace(case, axioms=case.axioms | {claim})


def remove_node(case: AssuranceCase, node_id: str) -> AssuranceCase:
    """Remove a justification or evidence node, returning a new case.

    Inferences referencing a removed justification keep running but lose it
    (their conclusions fall back to Undefined). Claims, strategies, and
    context nodes cannot be removed; rebuild the fragment instead.
    """
    node = case.node(node_id)
    if node.kind not in (NodeKind.JUSTIFICATION, NodeKind.EVIDENCE):
        raise CaseError(f"only justification or evidence nodes can be removed, not {node.kind.value}")
    nodes = tuple(n for n in case.nodes if n.id != node_id)
    inferences = tuple(
        replace(inf, justification=None) if inf.justification == node_id else inf
        for inf in case.inferences
    )
    return replace(case, nodes=nodes, inferences=inferences)


def _claim_graph(case: AssuranceCase) -> tuple[list[str], list[tuple[str, str]]]:
    claims = [n.id for n in case.claims()]
    edges = [(p, inf.conclusion) for inf in case.inferences for p in inf.premises]
    edges += [(b.from_claim, b.to_claim) for b in case.bindings]
    return claims, edges


def evaluate_status(case: AssuranceCase) -> dict[str, ClaimStatus]:
    """Fixpoint claim status over the combined inference/binding graph.

    Evaluation walks a topological order, so the result is independent of
    declaration order; the combined graph is acyclic by construction.
    """
    claims, edges = _claim_graph(case)
    try:
        order = graphs.topological_order(claims, edges)
    except ValueError as exc:
        raise CaseError(f"claim graph is not acyclic: {exc}") from exc
    node_map = case.node_map()
    conclusion_of = {inf.conclusion: inf for inf in case.inferences}
    bound_from: dict[str, str] = {}
    for binding in case.bindings:
        bound_from[binding.to_claim] = binding.from_claim

    status: dict[str, ClaimStatus] = {}
    for claim in order:
        if claim not in node_map:
            continue
        if claim in case.axioms:
            status[claim] = ClaimStatus.ASSUMED
            continue
        if any(ev.trusted for ev in case.evidence_for(claim)):
            status[claim] = ClaimStatus.SUPPORTED
            continue
        inference = conclusion_of.get(claim)
        if inference is not None:
            premise_statuses = [status[p] for p in inference.premises]
            strategy = node_map[inference.strategy]
            if not strategy.developed or ClaimStatus.UNSUPPORTED in premise_statuses:
                status[claim] = ClaimStatus.UNSUPPORTED
                continue
            justification = (
                node_map.get(inference.justification) if inference.justification else None
            )
            if justification is None or not justification.developed \
                    or ClaimStatus.UNDEFINED in premise_statuses:
                status[claim] = ClaimStatus.UNDEFINED
                continue
            status[claim] = ClaimStatus.SUPPORTED
            continue
        if claim in bound_from:
            status[claim] = status[bound_from[claim]]
            continue
        status[claim] = ClaimStatus.UNSUPPORTED
    return {c: status[c] for c in sorted(status)}


@dataclass(frozen=True)
class Trace:
    """The minimal support subgraph backward-reachable from one claim."""

    claim: str
    nodes: tuple[ArgumentNode, ...]
    inferences: tuple[Inference, ...]
    bindings: tuple[Binding, ...]

    def module_ids(self) -> tuple[str, ...]:
        return tuple(sorted({n.module for n in self.nodes}))


def trace(case: AssuranceCase, claim: str) -> Trace:
    """Everything the given claim's support rests on, deterministically ordered."""
    node_map = case.node_map()
    if claim not in node_map or node_map[claim].kind is not NodeKind.CLAIM:
        raise CaseError(f"unknown claim '{claim}'")
    conclusion_of = {inf.conclusion: inf for inf in case.inferences}
    bindings_to: dict[str, list[Binding]] = {}
    for binding in case.bindings:
        bindings_to.setdefault(binding.to_claim, []).append(binding)

    seen_nodes: set[str] = set()
    seen_inferences: list[Inference] = []
    seen_bindings: list[Binding] = []
    pending = [claim]
    while pending:
        current = pending.pop()
        if current in seen_nodes:
            continue
        seen_nodes.add(current)
        for ev in case.evidence_for(current):
            seen_nodes.add(ev.id)
        inference = conclusion_of.get(current)
        if inference is not None:
            seen_inferences.append(inference)
            seen_nodes.add(inference.strategy)
            if inference.justification:
                seen_nodes.add(inference.justification)
            seen_nodes.update(inference.contexts)
            pending.extend(inference.premises)
        for binding in bindings_to.get(current, ()):
            seen_bindings.append(binding)
            pending.append(binding.from_claim)

    nodes = tuple(sorted((node_map[i] for i in seen_nodes if i in node_map), key=lambda n: n.id))
    inferences = tuple(sorted(seen_inferences, key=lambda i: i.conclusion))
    bindings = tuple(sorted(seen_bindings, key=lambda b: (b.from_claim, b.to_claim)))
    return Trace(claim=claim, nodes=nodes, inferences=inferences, bindings=bindings)


# --- persistence ---------------------------------------------------------

def _module_to_dict(module: ComponentModule | RefinementModule) -> dict:
    if isinstance(module, ComponentModule):
        return {
            "id": module.id,
            "kind": "component",
            "component": module.component,
            "contracts": list(module.contracts),
            "interface_premises": [{"claim": r.claim, "spec": r.spec}
                                   for r in module.interface_premises],
            "interface_conclusions": [{"claim": r.claim, "spec": r.spec}
                                      for r in module.interface_conclusions],
        }
    return {
        "id": module.id,
        "kind": "refinement",
        "refinement": module.refinement,
        "premise_spec": module.premise_spec,
        "conclusion_spec": module.conclusion_spec,
    }


def architecture_to_dict(architecture: AssuranceArchitecture) -> dict:
    return {
        "component_modules": [_module_to_dict(m) for m in architecture.component_modules],
        "refinement_modules": [_module_to_dict(m) for m in architecture.refinement_modules],
        "bindings": [
            {
                "from_module": b.from_module,
                "from_claim": b.from_claim,
                "to_module": b.to_module,
                "to_claim": b.to_claim,
            }
            for b in architecture.bindings
        ],
    }


def architecture_from_dict(doc: dict) -> AssuranceArchitecture:
    component_modules = tuple(
        ComponentModule(
            id=m["id"],
            component=m["component"],
            contracts=tuple(m["contracts"]),
            interface_premises=tuple(
                ClaimRef(r["claim"], r["spec"]) for r in m["interface_premises"]
            ),
            interface_conclusions=tuple(
                ClaimRef(r["claim"], r["spec"]) for r in m["interface_conclusions"]
            ),
        )
        for m in doc["component_modules"]
    )
    refinement_modules = tuple(
        RefinementModule(
            id=m["id"],
            refinement=m["refinement"],
            premise_spec=m["premise_spec"],
            conclusion_spec=m["conclusion_spec"],
        )
        for m in doc["refinement_modules"]
    )
    bindings = tuple(
        Binding(b["from_module"], b["from_claim"], b["to_module"], b["to_claim"])
        for b in doc["bindings"]
    )
    return AssuranceArchitecture(component_modules, refinement_modules, bindings)


def node_to_dict(node: ArgumentNode) -> dict:
    out = {
        "id": node.id,
        "kind": node.kind.value,
        "text": node.text,
        "module": node.module,
        "developed": node.developed,
    }
    if node.kind is NodeKind.EVIDENCE:
        out["artifact"] = node.artifact
        out["trusted"] = node.trusted
        out["supports"] = node.supports
    return out


def node_from_dict(doc: dict) -> ArgumentNode:
    return ArgumentNode(
        id=doc["id"],
        kind=NodeKind(doc["kind"]),
        text=doc["text"],
        module=doc["module"],
        developed=doc["developed"],
        artifact=doc.get("artifact", ""),
        trusted=doc.get("trusted", False),
        supports=doc.get("supports"),
    )


def inference_to_dict(inference: Inference) -> dict:
    return {
        "strategy": inference.strategy,
        "premises": list(inference.premises),
        "conclusion": inference.conclusion,
        "justification": inference.justification,
        "contexts": list(inference.contexts),
    }


def inference_from_dict(doc: dict) -> Inference:
    return Inference(
        strategy=doc["strategy"],
        premises=tuple(doc["premises"]),
        conclusion=doc["conclusion"],
        justification=doc.get("justification"),
        contexts=tuple(doc.get("contexts", ())),
    )


def case_to_json(case: AssuranceCase) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "structure": structure_to_dict(case.structure),
        "architecture": architecture_to_dict(case.architecture),
        "nodes": [node_to_dict(n) for n in case.nodes],
        "inferences": [inference_to_dict(i) for i in case.inferences],
        "axioms": sorted(case.axioms),
    }
    return json.dumps(doc, indent=2) + "\n"


def case_from_json(text: str) -> AssuranceCase:
    from .dsl import JsonFormatError

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JsonFormatError(f"malformed document: {exc}") from exc
    check_schema_version(doc)
    for key in ("structure", "architecture", "nodes", "inferences", "axioms"):
        if key not in doc:
            raise JsonFormatError(f"missing required field '{key}'")
    try:
        case = AssuranceCase(
            structure=structure_from_dict(doc["structure"]),
            architecture=architecture_from_dict(doc["architecture"]),
            nodes=tuple(node_from_dict(n) for n in doc["nodes"]),
            inferences=tuple(inference_from_dict(i) for i in doc["inferences"]),
            axioms=frozenset(doc["axioms"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise JsonFormatError(f"malformed document: {exc}") from exc
    return case
