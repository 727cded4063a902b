from __future__ import annotations

import json
import random

import pytest

import contractcase as cc
from contractcase import (
    Concern,
    Contract,
    Provenance,
    Refinement,
    SpecKind,
    Specification,
    SpecificationStructure,
)
from caselib import develop_case
from genstructs import generate_structure
from oracles import concern_modules_bruteforce

ALL_EX_MODULES = {"M_Csys", "M_C1", "M_C2", "M_C3", "R_r1", "R_r2", "R_r3", "R_r4"}


def edit_spec_text(structure, spec_id, new_text):
    contracts = []
    for contract in structure.contracts:
        assumptions = tuple(
            Specification(a.id, a.kind, new_text) if a.id == spec_id else a
            for a in contract.assumptions
        )
        guarantee = contract.guarantee
        if guarantee.id == spec_id:
            guarantee = Specification(guarantee.id, guarantee.kind, new_text)
        contracts.append(Contract(contract.id, contract.component, assumptions, guarantee))
    return SpecificationStructure(
        structure.components, tuple(contracts), structure.refinements, structure.concerns
    )


@pytest.fixture
def ex_variant_c3b(ex_source):
    source = (
        ex_source
        .replace("component C3 within Csys;", "component C3b within Csys;")
        .replace("contract K3 for C3 {", "contract K3b for C3b {")
        .replace('guarantee G4: "Actuation reports status within one second.";',
                 'guarantee G4b: "Actuation reports health and status within one second.";')
        .replace("refine r4: G4 -> A5;", "refine r4: G4b -> A5;")
    )
    structure = cc.parse(source)
    assert not any(d.severity is cc.Severity.ERROR for d in cc.validate(structure, "strict"))
    return structure


def test_diff_identity(ex_structure):
    diff = cc.diff_structures(ex_structure, ex_structure)
    assert diff.is_empty()


def test_diff_single_text_edit(ex_structure):
    edited = edit_spec_text(ex_structure, "G4", "Actuation reports status within two seconds.")
    diff = cc.diff_structures(ex_structure, edited)
    assert diff.changed_specs == {"G4"}
    assert diff.added_specs == frozenset()
    assert diff.removed_specs == frozenset()
    # The refinement and contract digests fold in the edited text.
    assert diff.changed_refinements == {"r4"}
    assert diff.changed_contracts == {"K3"}
    assert diff.changed_components == frozenset()


def test_diff_added_component_and_contract(ex_structure):
    extended = SpecificationStructure(
        ex_structure.components + (cc.Component("C4", parent="Csys"),),
        ex_structure.contracts + (
            Contract("K4", "C4", (), Specification("G5", SpecKind.GUARANTEE, "logs rotate")),
        ),
        ex_structure.refinements,
    )
    diff = cc.diff_structures(ex_structure, extended)
    assert diff.added_specs == {"G5"}
    assert diff.changed_components == {"C4"}
    assert diff.changed_contracts == {"K4"}
    assert diff.changed_specs == frozenset()


def test_impact_g4_edit(ex_structure, ex_case):
    edited = edit_spec_text(ex_structure, "G4", "Actuation reports status within two seconds.")
    report = cc.impact(ex_case, cc.diff_structures(ex_structure, edited))
    assert report.needs_reverification == {"M_C3", "R_r4"}
    assert report.reusable == {"M_Csys", "M_C1", "M_C2", "R_r1", "R_r2", "R_r3"}
    assert report.new == frozenset()
    assert report.removed == frozenset()


def test_impact_a1_edit(ex_structure, ex_case):
    edited = edit_spec_text(ex_structure, "A1", "Operating conditions stay in a tighter envelope.")
    report = cc.impact(ex_case, cc.diff_structures(ex_structure, edited))
    assert report.needs_reverification == {"M_Csys", "R_r1"}
    assert "M_C2" in report.reusable


def test_impact_empty_diff(ex_structure, ex_case):
    report = cc.impact(ex_case, cc.diff_structures(ex_structure, ex_structure))
    assert report.reusable == ALL_EX_MODULES
    assert report.needs_reverification == frozenset()


def test_impact_requires_matching_old_structure(ex_case):
    other = generate_structure(3)
    diff = cc.diff_structures(other, other)
    with pytest.raises(ValueError):
        cc.impact(ex_case, diff)


def test_impact_partition_property(ex_structure, ex_case, ex_variant_c3b):
    for new in (ex_structure, ex_variant_c3b,
                edit_spec_text(ex_structure, "A3", "inputs are calibrated twice")):
        diff = cc.diff_structures(ex_structure, new)
        report = cc.impact(ex_case, diff)
        union = (report.reusable | report.needs_reverification
                 | report.new | report.removed)
        old_ids = set(ex_case.architecture.module_ids())
        new_ids = set(cc.derive_architecture(new).module_ids())
        assert union == old_ids | new_ids
        for a, b in (
            (report.reusable, report.needs_reverification),
            (report.reusable, report.new),
            (report.reusable, report.removed),
            (report.needs_reverification, report.new),
            (report.needs_reverification, report.removed),
            (report.new, report.removed),
        ):
            assert not (a & b)


def test_change_confinement_property():
    rng = random.Random(99)
    for seed in range(20):
        structure = generate_structure(seed)
        case = cc.build_case(structure)
        spec_ids = sorted(structure.specifications())
        spec_id = rng.choice(spec_ids)
        edited = edit_spec_text(structure, spec_id, "edited statement text")
        if cc.structures_equivalent(structure, edited):
            continue
        report = cc.impact(case, cc.diff_structures(structure, edited))
        expected: set[str] = set()
        for contract in structure.contracts:
            if any(s.id == spec_id for s in contract.specifications):
                expected.add(f"M_{contract.component}")
        for ref in structure.refinements:
            if spec_id in (ref.source, ref.target):
                expected.add(f"R_{ref.id}")
        assert report.needs_reverification == expected, f"seed {seed}, spec {spec_id}"


def test_library_roundtrip_and_assembly(tmp_path, ex_structure):
    library = cc.ModuleLibrary()
    empty_result = cc.assemble_variant(library, ex_structure)
    assert set(empty_result.provenance) == ALL_EX_MODULES
    assert all(p is Provenance.NEW for p in empty_result.provenance.values())

    case = develop_case(empty_result.case, axioms=("M_Csys__A1",))
    library.store_case(case, cc.evaluate_status(case))
    library.save(tmp_path / "lib")

    loaded = cc.ModuleLibrary.load(tmp_path / "lib")
    assert set(loaded.entries) == set(library.entries)
    result = cc.assemble_variant(loaded, ex_structure)
    assert all(p is Provenance.CACHED for p in result.provenance.values())
    # Imported fragments carry the full development, so status is restored.
    status = cc.evaluate_status(cc.declare_axiom(result.case, "M_Csys__A1"))
    assert status["M_Csys__G1"] is cc.ClaimStatus.SUPPORTED


def test_variant_assembly_cache_split(ex_structure, ex_variant_c3b):
    library = cc.ModuleLibrary()
    first = cc.assemble_variant(library, ex_structure)
    library.store_case(first.case)

    second = cc.assemble_variant(library, ex_variant_c3b)
    cached = {m for m, p in second.provenance.items() if p is Provenance.CACHED}
    fresh = {m for m, p in second.provenance.items() if p is Provenance.NEW}
    assert cached == {"M_Csys", "M_C1", "M_C2", "R_r1", "R_r2", "R_r3"}
    assert fresh == {"M_C3b", "R_r4"}


def test_refinement_rename_still_hits_cache(ex_structure):
    library = cc.ModuleLibrary()
    library.store_case(cc.assemble_variant(library, ex_structure).case)
    renamed = SpecificationStructure(
        ex_structure.components,
        ex_structure.contracts,
        tuple(Refinement("r9", r.source, r.target) if r.id == "r3" else r
              for r in ex_structure.refinements),
    )
    result = cc.assemble_variant(library, renamed)
    assert result.provenance["R_r9"] is Provenance.CACHED
    # The imported fragment is re-namespaced onto the new module id.
    assert any(n.module == "R_r9" for n in result.case.nodes)
    assert all(n.module != "R_r3" for n in result.case.nodes)


def test_cache_soundness(ex_structure, ex_variant_c3b):
    library = cc.ModuleLibrary()
    library.store_case(cc.assemble_variant(library, ex_structure).case)
    result = cc.assemble_variant(library, ex_variant_c3b)
    for module in result.case.architecture.component_modules:
        if result.provenance[module.id] is Provenance.CACHED:
            key = cc.component_module_key(ex_variant_c3b, module.component)
            assert key in library.entries
    for module in result.case.architecture.refinement_modules:
        if result.provenance[module.id] is Provenance.CACHED:
            key = cc.refinement_module_key(ex_variant_c3b, module.refinement)
            assert key in library.entries


def test_corrupt_library_record_rejected(tmp_path, ex_structure):
    library = cc.ModuleLibrary()
    library.store_case(cc.assemble_variant(library, ex_structure).case)
    library.save(tmp_path / "lib")

    index = json.loads((tmp_path / "lib" / "index.json").read_text())
    key, filename = sorted(index["entries"].items())[0]
    record_path = tmp_path / "lib" / filename
    record = json.loads(record_path.read_text())
    record["kind"] = "refinement" if record["kind"] == "component" else "component"
    record_path.write_text(json.dumps(record))

    corrupted = cc.ModuleLibrary.load(tmp_path / "lib")
    with pytest.raises(cc.LibraryError):
        cc.assemble_variant(corrupted, ex_structure)


def test_concern_modules_on_ex(ex_structure):
    tagged = SpecificationStructure(
        ex_structure.components, ex_structure.contracts, ex_structure.refinements,
        (Concern("mission", ("G1",)), Concern("sensing", ("G2",)),
         Concern("planning", ("G3",))),
    )
    case = cc.build_case(tagged)
    assert cc.concern_modules(case, "mission") == ALL_EX_MODULES
    assert cc.concern_modules(case, "sensing") == {"M_C1"}
    assert cc.concern_modules(case, "planning") == {"M_C2", "M_C1", "M_Csys", "R_r1", "R_r2"}
    with pytest.raises(KeyError):
        cc.concern_modules(case, "styling")


def test_concern_modules_match_bruteforce_oracle():
    for seed in range(30):
        structure = generate_structure(seed, max_specs=20, with_concerns=True)
        case = cc.build_case(structure)
        for concern in structure.concern_map():
            assert cc.concern_modules(case, concern) == \
                concern_modules_bruteforce(structure, concern), f"seed {seed}"
