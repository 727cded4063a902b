"""Independent brute-force oracles the fast implementations are checked against."""

from __future__ import annotations

from contractcase import EdgeKind, SpecificationStructure, owner_of


def concern_modules_bruteforce(structure: SpecificationStructure, concern: str) -> frozenset[str]:
    """Enumerate every backward path from each covered guarantee explicitly,
    collecting the owning component module of every specification on every
    path plus the refinement module of every refinement edge walked."""
    reverse: dict[str, list[tuple[str, EdgeKind]]] = {}
    for contract in structure.contracts:
        for assumption in contract.assumptions:
            reverse.setdefault(contract.guarantee.id, []).append(
                (assumption.id, EdgeKind.ASSUMPTION_OF)
            )
    refinement_of_edge: dict[tuple[str, str], str] = {}
    for ref in structure.refinements:
        reverse.setdefault(ref.target, []).append((ref.source, EdgeKind.REFINEMENT_OF))
        refinement_of_edge[(ref.source, ref.target)] = ref.id

    modules: set[str] = set()

    def walk(spec: str, path: tuple[str, ...]) -> None:
        for node in path:
            _, owner = owner_of(structure, node)
            modules.add(f"M_{owner}")
        for source, kind in reverse.get(spec, ()):
            if kind is EdgeKind.REFINEMENT_OF:
                modules.add(f"R_{refinement_of_edge[(source, spec)]}")
            if source not in path:
                walk(source, path + (source,))

    for guarantee in sorted(structure.concern_map()[concern]):
        walk(guarantee, (guarantee,))
    return frozenset(modules)
