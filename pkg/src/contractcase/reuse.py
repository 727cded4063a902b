"""Change impact, product-line assembly, and multi-concern queries.

The reuse condition is content-based: a component module is reusable
exactly when every contract allocated to its component is unchanged (all
assumption and guarantee texts included), and a refinement module is
reusable exactly when both its endpoint specifications are unchanged.
Library keys hash those defining inputs, so assurance work transfers
between any variants that agree on them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .architect import (
    ArgumentNode,
    AssuranceArchitecture,
    component_module_id,
    refinement_module_id,
)
from .argument import (
    AssuranceCase,
    ClaimStatus,
    Inference,
    build_case,
    inference_from_dict,
    inference_to_dict,
    node_from_dict,
    node_to_dict,
)
from .dsl import SCHEMA_VERSION, check_schema_version
from .model import (
    EdgeKind,
    SpecificationStructure,
    _spec_bytes,
    build_graph,
    content_hash,
    owner_of,
    spec_content_hash,
)


class LibraryError(Exception):
    """A module library record cannot be used."""


@dataclass(frozen=True)
class StructureDiff:
    """Element-wise comparison of two structures by id and content hash.

    "Changed" means same id, different content; additions and removals are
    listed separately for specifications and refinements. For components
    and contracts a single set records any definition difference, existence
    included. The compared structures ride along so downstream analysis
    (impact) can resolve ownership in the new version.
    """

    old: SpecificationStructure
    new: SpecificationStructure
    changed_specs: frozenset[str] = frozenset()
    added_specs: frozenset[str] = frozenset()
    removed_specs: frozenset[str] = frozenset()
    changed_refinements: frozenset[str] = frozenset()
    added_refinements: frozenset[str] = frozenset()
    removed_refinements: frozenset[str] = frozenset()
    changed_components: frozenset[str] = frozenset()
    changed_contracts: frozenset[str] = frozenset()

    def is_empty(self) -> bool:
        return not (
            self.changed_specs or self.added_specs or self.removed_specs
            or self.changed_refinements or self.added_refinements or self.removed_refinements
            or self.changed_components or self.changed_contracts
        )


def diff_structures(old: SpecificationStructure, new: SpecificationStructure) -> StructureDiff:
    old_specs = old.specifications()
    new_specs = new.specifications()
    changed_specs = {
        sid for sid in old_specs.keys() & new_specs.keys()
        if spec_content_hash(old_specs[sid]) != spec_content_hash(new_specs[sid])
    }

    old_refs = old.refinement_map()
    new_refs = new.refinement_map()
    changed_refinements = {
        rid for rid in old_refs.keys() & new_refs.keys()
        if content_hash(old_refs[rid], old) != content_hash(new_refs[rid], new)
    }

    old_comps = old.component_map()
    new_comps = new.component_map()
    changed_components = {
        cid for cid in old_comps.keys() & new_comps.keys()
        if content_hash(old_comps[cid]) != content_hash(new_comps[cid])
    }
    changed_components |= old_comps.keys() ^ new_comps.keys()

    old_contracts = old.contract_map()
    new_contracts = new.contract_map()
    changed_contracts = {
        kid for kid in old_contracts.keys() & new_contracts.keys()
        if content_hash(old_contracts[kid]) != content_hash(new_contracts[kid])
    }
    changed_contracts |= old_contracts.keys() ^ new_contracts.keys()

    return StructureDiff(
        old=old,
        new=new,
        changed_specs=frozenset(changed_specs),
        added_specs=frozenset(new_specs.keys() - old_specs.keys()),
        removed_specs=frozenset(old_specs.keys() - new_specs.keys()),
        changed_refinements=frozenset(changed_refinements),
        added_refinements=frozenset(new_refs.keys() - old_refs.keys()),
        removed_refinements=frozenset(old_refs.keys() - new_refs.keys()),
        changed_components=frozenset(changed_components),
        changed_contracts=frozenset(changed_contracts),
    )


@dataclass(frozen=True)
class ImpactReport:
    """Partition of old and new module ids by what a change does to them."""

    reusable: frozenset[str]
    needs_reverification: frozenset[str]
    new: frozenset[str]
    removed: frozenset[str]

    def to_dict(self) -> dict:
        return {
            "reusable": sorted(self.reusable),
            "needs_reverification": sorted(self.needs_reverification),
            "new": sorted(self.new),
            "removed": sorted(self.removed),
        }


def _module_ids_of(structure: SpecificationStructure) -> dict[str, str]:
    """module id -> defining element id for every module the structure implies."""
    out: dict[str, str] = {}
    for comp in structure.components:
        if structure.contracts_of(comp.id):
            out[component_module_id(comp.id)] = comp.id
    for ref in structure.refinements:
        out[refinement_module_id(ref.id)] = ref.id
    return out


def impact(old_case: AssuranceCase, diff: StructureDiff) -> ImpactReport:
    """Classify every module of the old case and the new structure.

    A surviving component module needs reverification iff its component's
    contract set changed or any of those contracts' content changed; a
    surviving refinement module iff its endpoints or the refinement itself
    changed. Everything else surviving is reusable.
    """
    from .model import structures_equivalent

    if not structures_equivalent(diff.old, old_case.structure):
        raise ValueError("diff was not computed against the old case's structure")
    old_structure, new_structure = diff.old, diff.new
    old_modules = set(old_case.architecture.module_ids())
    new_modules = set(_module_ids_of(new_structure))

    removed = old_modules - new_modules
    added = new_modules - old_modules
    needs: set[str] = set()

    for module in old_case.architecture.component_modules:
        if module.id not in new_modules:
            continue
        old_contracts = {k.id: content_hash(k) for k in old_structure.contracts_of(module.component)}
        new_contracts = {k.id: content_hash(k) for k in new_structure.contracts_of(module.component)}
        if old_contracts != new_contracts:
            needs.add(module.id)

    old_refs = old_structure.refinement_map()
    new_refs = new_structure.refinement_map()
    for module in old_case.architecture.refinement_modules:
        if module.id not in new_modules:
            continue
        rid = module.refinement
        if content_hash(old_refs[rid], old_structure) != content_hash(new_refs[rid], new_structure):
            needs.add(module.id)

    reusable = (old_modules & new_modules) - needs
    return ImpactReport(
        reusable=frozenset(reusable),
        needs_reverification=frozenset(needs),
        new=frozenset(added),
        removed=frozenset(removed),
    )


# --- module library ------------------------------------------------------

def component_module_key(structure: SpecificationStructure, component_id: str) -> str:
    """Library key for a component module: digest of its contracts' full content."""
    h = hashlib.sha256(b"module:component\0")
    for digest in sorted(content_hash(k) for k in structure.contracts_of(component_id)):
        h.update(digest.encode() + b"\0")
    return h.hexdigest()


def refinement_module_key(structure: SpecificationStructure, refinement_id: str) -> str:
    """Library key for a refinement module: digest of its endpoints' full content.

    The refinement's own id is deliberately excluded so renaming a
    refinement does not invalidate its assured module.
    """
    ref = structure.refinement_map()[refinement_id]
    specs = structure.specifications()
    h = hashlib.sha256(b"module:refinement\0")
    h.update(_spec_bytes(specs[ref.source]))
    h.update(_spec_bytes(specs[ref.target]))
    return h.hexdigest()


class Provenance(Enum):
    CACHED = "Cached"
    NEW = "New"


@dataclass(frozen=True)
class LibraryRecord:
    """An assured module keyed by the content of its defining inputs."""

    key: str
    kind: str  # "component" | "refinement"
    module_id: str
    interface: tuple[str, ...]  # contract ids, or (source spec, target spec)
    nodes: tuple[ArgumentNode, ...]
    inferences: tuple[Inference, ...]
    status: tuple[tuple[str, str], ...]  # claim id -> status value, sorted

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "key": self.key,
            "kind": self.kind,
            "module_id": self.module_id,
            "interface": list(self.interface),
            "nodes": [node_to_dict(n) for n in self.nodes],
            "inferences": [inference_to_dict(i) for i in self.inferences],
            "status": {claim: value for claim, value in self.status},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LibraryRecord":
        check_schema_version(doc)
        return cls(
            key=doc["key"],
            kind=doc["kind"],
            module_id=doc["module_id"],
            interface=tuple(doc["interface"]),
            nodes=tuple(node_from_dict(n) for n in doc["nodes"]),
            inferences=tuple(inference_from_dict(i) for i in doc["inferences"]),
            status=tuple(sorted(doc["status"].items())),
        )


@dataclass
class ModuleLibrary:
    """Content-addressed store of assured modules.

    Reads are safe to share; writes (store/save) follow a single-writer
    contract and must be serialized externally.
    """

    entries: dict[str, LibraryRecord] = field(default_factory=dict)

    @classmethod
    def load(cls, directory: str | Path) -> "ModuleLibrary":
        directory = Path(directory)
        index_path = directory / "index.json"
        if not index_path.exists():
            return cls()
        index = check_schema_version(json.loads(index_path.read_text(encoding="utf-8")))
        entries: dict[str, LibraryRecord] = {}
        for key, filename in index["entries"].items():
            record = LibraryRecord.from_dict(
                json.loads((directory / filename).read_text(encoding="utf-8"))
            )
            if record.key != key:
                raise LibraryError(f"library record {filename} does not match its index key")
            entries[key] = record
        return cls(entries=entries)

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        index = {"schema_version": SCHEMA_VERSION, "entries": {}}
        for key in sorted(self.entries):
            filename = f"{key}.json"
            (directory / filename).write_text(
                json.dumps(self.entries[key].to_dict(), indent=2) + "\n", encoding="utf-8"
            )
            index["entries"][key] = filename
        (directory / "index.json").write_text(json.dumps(index, indent=2) + "\n", encoding="utf-8")

    def store_case(
        self, case: AssuranceCase, status: dict[str, ClaimStatus] | None = None
    ) -> list[str]:
        """Insert every module of a case; returns the keys written."""
        status = status or {}
        written: list[str] = []
        for module in case.architecture.component_modules:
            key = component_module_key(case.structure, module.component)
            written.append(key)
            self.entries[key] = self._record(case, module.id, key, "component",
                                             module.contracts, status)
        structure = case.structure
        for module in case.architecture.refinement_modules:
            key = refinement_module_key(structure, module.refinement)
            written.append(key)
            ref = structure.refinement_map()[module.refinement]
            self.entries[key] = self._record(case, module.id, key, "refinement",
                                             (ref.source, ref.target), status)
        return written

    def _record(self, case: AssuranceCase, module_id: str, key: str, kind: str,
                interface: tuple[str, ...], status: dict[str, ClaimStatus]) -> LibraryRecord:
        nodes = case.module_nodes(module_id)
        node_ids = {n.id for n in nodes}
        inferences = tuple(i for i in case.inferences if i.conclusion in node_ids)
        snapshot = tuple(sorted(
            (n.id, status[n.id].value) for n in nodes if n.id in status
        ))
        return LibraryRecord(
            key=key,
            kind=kind,
            module_id=module_id,
            interface=tuple(interface),
            nodes=nodes,
            inferences=inferences,
            status=snapshot,
        )


@dataclass(frozen=True)
class AssembleResult:
    case: AssuranceCase
    architecture: AssuranceArchitecture
    provenance: dict[str, Provenance]
    imported_status: dict[str, str]


def _rename_fragment(
    record: LibraryRecord, target_module: str
) -> tuple[tuple[ArgumentNode, ...], tuple[Inference, ...], dict[str, str]]:
    """Re-namespace a stored fragment onto the target module id."""
    prefix = record.module_id + "__"

    def rename(node_id: str) -> str:
        suffix = node_id[len(prefix):] if node_id.startswith(prefix) else node_id
        return f"{target_module}__{suffix}"

    nodes = tuple(
        ArgumentNode(
            id=rename(n.id),
            kind=n.kind,
            text=n.text,
            module=target_module,
            developed=n.developed,
            artifact=n.artifact,
            trusted=n.trusted,
            supports=rename(n.supports) if n.supports else None,
        )
        for n in record.nodes
    )
    inferences = tuple(
        Inference(
            strategy=rename(i.strategy),
            premises=tuple(rename(p) for p in i.premises),
            conclusion=rename(i.conclusion),
            justification=rename(i.justification) if i.justification else None,
            contexts=tuple(rename(c) for c in i.contexts),
        )
        for i in record.inferences
    )
    status = {rename(claim): value for claim, value in record.status}
    return nodes, inferences, status


def assemble_variant(
    library: ModuleLibrary, structure: SpecificationStructure
) -> AssembleResult:
    """Build a variant's case, importing assured modules from the library.

    Modules whose key hits the library come back Cached with their argument
    fragment (and status snapshot) imported; misses get fresh templates and
    are marked New. A record whose shape disagrees with the derived module
    raises LibraryError.
    """
    case = build_case(structure, mode="strict")
    provenance: dict[str, Provenance] = {}
    imported_status: dict[str, str] = {}

    for module in case.architecture.component_modules:
        key = component_module_key(structure, module.component)
        record = library.entries.get(key)
        if record is None:
            provenance[module.id] = Provenance.NEW
            continue
        if record.kind != "component" or set(record.interface) != set(module.contracts):
            raise LibraryError(
                f"library record {key} does not match the shape of module {module.id}"
            )
        case = _import_fragment(case, module.id, record)
        provenance[module.id] = Provenance.CACHED
        _, _, status = _rename_fragment(record, module.id)
        imported_status.update(status)

    refinement_map = structure.refinement_map()
    for module in case.architecture.refinement_modules:
        key = refinement_module_key(structure, module.refinement)
        record = library.entries.get(key)
        if record is None:
            provenance[module.id] = Provenance.NEW
            continue
        ref = refinement_map[module.refinement]
        # The key digests endpoint id+kind+text, so on a genuine hit the
        # stored endpoint ids must agree; anything else is corruption.
        if record.kind != "refinement" or tuple(record.interface) != (ref.source, ref.target):
            raise LibraryError(
                f"library record {key} does not match the shape of module {module.id}"
            )
        case = _import_fragment(case, module.id, record)
        provenance[module.id] = Provenance.CACHED
        _, _, status = _rename_fragment(record, module.id)
        imported_status.update(status)

    return AssembleResult(
        case=case,
        architecture=case.architecture,
        provenance=provenance,
        imported_status=imported_status,
    )


def _import_fragment(case: AssuranceCase, module_id: str, record: LibraryRecord) -> AssuranceCase:
    nodes, inferences, _ = _rename_fragment(record, module_id)
    kept_nodes = tuple(n for n in case.nodes if n.module != module_id)
    kept_ids = {n.id for n in kept_nodes}
    dropped = {n.id for n in case.nodes if n.module == module_id}
    kept_inferences = tuple(i for i in case.inferences if i.conclusion not in dropped)
    for node in nodes:
        if node.id in kept_ids:
            raise LibraryError(f"imported node {node.id} collides with an existing node")
    return replace(case, nodes=kept_nodes + nodes, inferences=kept_inferences + inferences)


# --- multi-concern queries -----------------------------------------------

def concern_modules(case: AssuranceCase, concern: str) -> frozenset[str]:
    """Modules contributing to a concern: backward closure from its guarantees.

    For each covered guarantee, collect the owning component module of
    every specification backward-reachable over assumption-of and
    refinement-of edges, plus the refinement module of every traversed
    refinement edge.
    """
    structure = case.structure
    concerns = structure.concern_map()
    if concern not in concerns:
        raise KeyError(f"unknown concern '{concern}'")
    graph = build_graph(structure)
    predecessors = graph.predecessors()
    refinement_by_edge = {
        (r.source, r.target): r.id for r in structure.refinements
    }
    edge_kinds = {(e.source, e.target): e.kind for e in graph.edges}

    modules: set[str] = set()
    for guarantee in sorted(concerns[concern]):
        pending = [guarantee]
        visited: set[str] = set()
        while pending:
            spec = pending.pop()
            if spec in visited:
                continue
            visited.add(spec)
            _, owner = owner_of(structure, spec)
            modules.add(component_module_id(owner))
            for pred in predecessors.get(spec, ()):
                if edge_kinds[(pred, spec)] is EdgeKind.REFINEMENT_OF:
                    modules.add(refinement_module_id(refinement_by_edge[(pred, spec)]))
                pending.append(pred)
    return frozenset(modules)
