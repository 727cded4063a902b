"""Semantic analysis: the well-formedness rules W1..W8 plus one structural warning.

Rules (severity fixed per rule except W7, which is mode-dependent):

  W1  Error    unresolved reference, or duplicate id within an element kind
  W2  Error    component parent relation is not a single-rooted tree
  W3  Error    a specification id is used by zero or multiple contracts
  W4  Error    a refinement targets something other than an assumption
  W5  Error    a refinement matches none of the three dependency kinds
  W6  Error    an assumption is discharged by more than one refinement
  W7  Error/Warning  a non-root assumption is discharged by no refinement
                     (Error in strict mode, Warning in lenient mode)
  W8  Error    the combined assumption-of/refinement-of graph has a cycle
  W9  Warning  a component has no allocated contract

W9 extends the W1..W8 set: the no-contract finding is part of the rule
catalogue but is not one of the eight numbered rules, so it gets the next
free code. Validation is pure and order-stable: permuting declaration
order changes no diagnostic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from . import graphs
from .model import (
    DependencyKind,
    Refinement,
    SpecKind,
    SpecificationStructure,
    dependency_kind,
    unresolved_references,
)

_MODES = ("strict", "lenient")

_KIND_LABELS = {
    DependencyKind.PARENT_ASSUMPTION_TO_CHILD_ASSUMPTION: "parent assumption -> child assumption",
    DependencyKind.SIBLING_GUARANTEE_TO_SIBLING_ASSUMPTION: "sibling guarantee -> sibling assumption",
    DependencyKind.CHILD_GUARANTEE_TO_PARENT_ASSUMPTION: "child guarantee -> parent assumption",
}


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    subjects: tuple[str, ...]
    message: str

    def render(self) -> str:
        return f"{self.code} {self.severity.value}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "subjects": list(self.subjects),
            "message": self.message,
        }


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def validate(structure: SpecificationStructure, mode: str = "strict") -> list[Diagnostic]:
    """All well-formedness findings, ordered by (code, subject ids)."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    out: list[Diagnostic] = []
    _check_w1(structure, out)
    _check_w2(structure, out)
    _check_w3(structure, out)
    _check_w4_w5(structure, out)
    _check_w6_w7(structure, out, mode)
    _check_w8(structure, out)
    _check_w9(structure, out)
    out.sort(key=lambda d: (d.code, d.subjects, d.message))
    return out


def _err(out: list[Diagnostic], code: str, subjects: tuple[str, ...], message: str,
         severity: Severity = Severity.ERROR) -> None:
    out.append(Diagnostic(code, severity, subjects, message))


def _check_w1(structure: SpecificationStructure, out: list[Diagnostic]) -> None:
    for identifier, site in unresolved_references(structure):
        _err(out, "W1", (site.split()[1], identifier),
             f"{site} references unknown identifier '{identifier}'")
    declared = {
        "component": [c.id for c in structure.components],
        "contract": [k.id for k in structure.contracts],
        "specification": [s.id for k in structure.contracts for s in k.specifications],
        "refinement": [r.id for r in structure.refinements],
        "concern": [c.name for c in structure.concerns],
    }
    for kind, ids in declared.items():
        for ident, count in sorted(Counter(ids).items()):
            if count > 1:
                _err(out, "W1", (ident,), f"duplicate {kind} id '{ident}' ({count} declarations)")


def _check_w2(structure: SpecificationStructure, out: list[Diagnostic]) -> None:
    if not structure.components:
        return
    known = {c.id for c in structure.components}
    roots = sorted(c.id for c in structure.roots())
    if len(roots) == 0:
        _err(out, "W2", (), "component tree has no root (every component has a parent)")
    elif len(roots) > 1:
        _err(out, "W2", tuple(roots),
             f"component tree must have exactly one root; roots: {', '.join(roots)}")
    # Parent chains must terminate; walk each component upward.
    reported: set[frozenset[str]] = set()
    for comp in structure.components:
        chain = [comp.id]
        seen = {comp.id}
        parents = {c.id: c.parent for c in structure.components}
        current = comp.parent
        while current is not None and current in known:
            if current in seen:
                loop_start = chain.index(current)
                cycle = chain[loop_start:]
                pivot = cycle.index(min(cycle))
                cycle = cycle[pivot:] + cycle[:pivot]
                key = frozenset(cycle)
                if key not in reported:
                    reported.add(key)
                    _err(out, "W2", tuple(cycle),
                         "component parent chain forms a cycle: " + " -> ".join(cycle + [cycle[0]]))
                break
            chain.append(current)
            seen.add(current)
            current = parents.get(current)


def _check_w3(structure: SpecificationStructure, out: list[Diagnostic]) -> None:
    owners: dict[str, list[str]] = {}
    for contract in structure.contracts:
        for spec in contract.specifications:
            owners.setdefault(spec.id, []).append(contract.id)
    for spec_id, contract_ids in sorted(owners.items()):
        if len(contract_ids) > 1:
            listed = ", ".join(sorted(contract_ids))
            _err(out, "W3", (spec_id,) + tuple(sorted(contract_ids)),
                 f"specification {spec_id} is owned by multiple contracts ({listed})")


def _resolvable(structure: SpecificationStructure, refinement: Refinement) -> bool:
    specs = structure.specifications()
    owners: Counter[str] = Counter()
    for contract in structure.contracts:
        for spec in contract.specifications:
            owners[spec.id] += 1
    return (
        refinement.source in specs
        and refinement.target in specs
        and owners[refinement.source] == 1
        and owners[refinement.target] == 1
    )


def _check_w4_w5(structure: SpecificationStructure, out: list[Diagnostic]) -> None:
    specs = structure.specifications()
    for ref in sorted(structure.refinements, key=lambda r: r.id):
        if not _resolvable(structure, ref):
            continue  # W1/W3 already carry the finding
        target = specs[ref.target]
        if target.kind is not SpecKind.ASSUMPTION:
            _err(out, "W4", (ref.id,),
                 f"refinement {ref.id} targets guarantee {target.id}; refinements must target "
                 "assumptions (A⊑A or G⊑A only)")
            continue
        if dependency_kind(structure, ref) is DependencyKind.ILLEGAL:
            legal = ", ".join(_KIND_LABELS.values())
            _err(out, "W5", (ref.id,),
                 f"refinement {ref.id} ({ref.source} -> {ref.target}) matches no legal "
                 f"dependency kind ({legal})")


def _check_w6_w7(structure: SpecificationStructure, out: list[Diagnostic], mode: str) -> None:
    specs = structure.specifications()
    dischargers: dict[str, list[str]] = {}
    for ref in structure.refinements:
        target = specs.get(ref.target)
        if target is not None and target.kind is SpecKind.ASSUMPTION:
            dischargers.setdefault(ref.target, []).append(ref.id)
    for spec_id, ref_ids in sorted(dischargers.items()):
        if len(ref_ids) > 1:
            listed = ", ".join(sorted(ref_ids))
            _err(out, "W6", (spec_id,) + tuple(sorted(ref_ids)),
                 f"assumption {spec_id} is discharged by multiple refinements ({listed})")
    root_ids = {c.id for c in structure.roots()}
    severity = Severity.ERROR if mode == "strict" else Severity.WARNING
    for contract in structure.contracts:
        if contract.component in root_ids:
            continue
        for assumption in contract.assumptions:
            if assumption.id not in dischargers:
                _err(out, "W7", (assumption.id,),
                     f"assumption {assumption.id} of component {contract.component} is not "
                     "discharged by any refinement", severity)


def _check_w8(structure: SpecificationStructure, out: list[Diagnostic]) -> None:
    specs = structure.specifications()
    edges: list[tuple[str, str]] = []
    for contract in structure.contracts:
        for assumption in contract.assumptions:
            edges.append((assumption.id, contract.guarantee.id))
    for ref in structure.refinements:
        if ref.source in specs and ref.target in specs:
            edges.append((ref.source, ref.target))
    cycle = graphs.find_cycle(specs.keys(), edges)
    if cycle is not None:
        _err(out, "W8", tuple(cycle),
             "specification graph contains a cycle: " + " -> ".join(cycle + [cycle[0]]))


def _check_w9(structure: SpecificationStructure, out: list[Diagnostic]) -> None:
    with_contracts = {k.component for k in structure.contracts}
    for comp in sorted(structure.components, key=lambda c: c.id):
        if comp.id not in with_contracts:
            _err(out, "W9", (comp.id,),
                 f"component {comp.id} has no allocated contract", Severity.WARNING)
