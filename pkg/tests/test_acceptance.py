"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
"""

from __future__ import annotations

import random
import subprocess
import sys
import time

import pytest

import contractcase as cc
from contractcase import NodeKind, Provenance, RenderOptions
from caselib import develop_case
from conftest import EX_PATH
from dotcheck import check_dot
from genstructs import generate_structure, inject_cycle
from oracles import concern_modules_bruteforce

EX_BINDINGS = {
    ("M_Csys", "M_Csys__A1", "R_r1", "R_r1__A1"),
    ("R_r1", "R_r1__A2", "M_C2", "M_C2__A2"),
    ("M_C1", "M_C1__G2", "R_r2", "R_r2__G2"),
    ("R_r2", "R_r2__A3", "M_C2", "M_C2__A3"),
    ("M_C2", "M_C2__G3", "R_r3", "R_r3__G3"),
    ("R_r3", "R_r3__A4", "M_C3", "M_C3__A4"),
    ("M_C3", "M_C3__G4", "R_r4", "R_r4__G4"),
    ("R_r4", "R_r4__A5", "M_Csys", "M_Csys__A5"),
}


def verdict(number: int, description: str) -> None:
    print(f"acceptance criterion {number}: PASS - {description}")


def test_criterion_1_worked_example_reconstruction(ex_source):
    started = time.perf_counter()
    structure = cc.parse(ex_source)
    assert cc.validate(structure, "strict") == []
    case = cc.build_case(structure)
    elapsed = time.perf_counter() - started

    architecture = case.architecture
    assert len(architecture.component_modules) == 4
    assert len(architecture.refinement_modules) == 4
    bindings = {(b.from_module, b.from_claim, b.to_module, b.to_claim)
                for b in architecture.bindings}
    assert bindings == EX_BINDINGS
    for module in architecture.refinement_modules:
        assert sum(1 for b in architecture.bindings if b.to_module == module.id) == 1
        assert sum(1 for b in architecture.bindings if b.from_module == module.id) == 1
    assert elapsed < 1.0, f"compilation took {elapsed:.3f}s"
    verdict(1, f"4+4 modules with the expected binding topology in {elapsed * 1000:.0f} ms")


def test_criterion_2_refinement_restriction(ex_structure):
    broken = cc.SpecificationStructure(
        ex_structure.components,
        ex_structure.contracts,
        ex_structure.refinements + (cc.Refinement("r5", "G4", "G1"),),
    )
    diagnostics = cc.validate(broken, "strict")
    w4 = [d for d in diagnostics if d.code == "W4"]
    assert len(w4) == 1
    assert w4[0].severity is cc.Severity.ERROR
    assert w4[0].subjects == ("r5",)
    assert diagnostics == w4  # nothing else fires
    with pytest.raises(cc.ArchitectureError):
        cc.derive_architecture(broken)
    verdict(2, "guarantee-to-guarantee refinement yields exactly one W4 and is refused")


def test_criterion_3_change_confinement(ex_structure, ex_case):
    edited_contracts = []
    for contract in ex_structure.contracts:
        guarantee = contract.guarantee
        if guarantee.id == "G4":
            guarantee = cc.Specification("G4", cc.SpecKind.GUARANTEE,
                                         guarantee.text + " (revised)")
        edited_contracts.append(cc.Contract(contract.id, contract.component,
                                            contract.assumptions, guarantee))
    edited = cc.SpecificationStructure(
        ex_structure.components, tuple(edited_contracts), ex_structure.refinements
    )
    report = cc.impact(ex_case, cc.diff_structures(ex_structure, edited))
    assert report.needs_reverification == {"M_C3", "R_r4"}
    assert report.reusable == {"M_Csys", "M_C1", "M_C2", "R_r1", "R_r2", "R_r3"}
    assert report.new == frozenset() and report.removed == frozenset()
    verdict(3, "a G4 text edit flags exactly {M_C3, R_r4} and reuses the other six")


def test_criterion_4_justification_and_evidence_semantics(developed_case):
    base = cc.evaluate_status(developed_case)
    assert base["M_Csys__G1"] is cc.ClaimStatus.SUPPORTED
    tr = cc.trace(developed_case, "M_Csys__G1")

    justifications = [n for n in tr.nodes if n.kind is NodeKind.JUSTIFICATION]
    assert len(justifications) == 8
    for node in justifications:
        status = cc.evaluate_status(cc.remove_node(developed_case, node.id))
        assert status["M_Csys__G1"] is cc.ClaimStatus.UNDEFINED, node.id

    evidence = [n for n in tr.nodes if n.kind is NodeKind.EVIDENCE and n.trusted]
    assert len(evidence) == 8
    for node in evidence:
        status = cc.evaluate_status(cc.remove_node(developed_case, node.id))
        assert status["M_Csys__G1"] is cc.ClaimStatus.UNSUPPORTED, node.id
        assert status[node.supports] is cc.ClaimStatus.UNSUPPORTED
    verdict(4, "every justification removal gives Undefined, every evidence removal "
               "gives Unsupported (8 + 8 cases)")


def test_criterion_5_roundtrip_on_random_structures():
    failures = 0
    for seed in range(200):
        structure = generate_structure(seed, max_components=10, max_specs=25,
                                       with_concerns=(seed % 3 == 0))
        assert len(structure.components) <= 10
        assert len(structure.specifications()) <= 25
        canonical = cc.serialize(structure)
        reparsed = cc.parse(canonical)
        if not cc.structures_equivalent(reparsed, structure):
            failures += 1
        if cc.serialize(reparsed) != canonical:
            failures += 1
    assert failures == 0
    verdict(5, "parse/serialize round-trip and one-step fixpoint on 200 structures")


def test_criterion_6_concern_oracle_equivalence():
    checked = 0
    seed = 0
    while checked < 200:
        structure = generate_structure(seed, max_specs=20, with_concerns=True)
        seed += 1
        case = cc.build_case(structure)
        for concern in sorted(structure.concern_map()):
            assert cc.concern_modules(case, concern) == \
                concern_modules_bruteforce(structure, concern), f"seed {seed - 1}"
            checked += 1
    assert checked >= 200
    verdict(6, f"concern closure matches brute-force path enumeration on {checked} concerns")


def test_criterion_7_cycle_injection_always_detected():
    rng = random.Random(2024)
    detected = 0
    seed = 0
    while detected < 100:
        structure = generate_structure(seed)
        seed += 1
        injected = inject_cycle(structure, rng)
        if injected is None:
            continue
        broken, refinement = injected
        diagnostics = cc.validate(broken, "strict")
        w8 = [d for d in diagnostics if d.code == "W8"]
        assert len(w8) == 1, f"seed {seed - 1}: expected one W8"
        witness = list(w8[0].subjects)
        assert len(witness) >= 2
        edges = set()
        for contract in broken.contracts:
            for assumption in contract.assumptions:
                edges.add((assumption.id, contract.guarantee.id))
        for ref in broken.refinements:
            edges.add((ref.source, ref.target))
        for i, node in enumerate(witness):
            assert (node, witness[(i + 1) % len(witness)]) in edges, \
                f"seed {seed - 1}: witness is not a cycle"
        assert refinement.id in {r.id for r in broken.refinements}
        detected += 1
    verdict(7, f"all {detected} injected cycles detected with verified witnesses")


def test_criterion_8_product_line_reuse(ex_source):
    variant1 = cc.parse(ex_source)
    variant2 = cc.parse(
        ex_source
        .replace("component C3 within Csys;", "component C3 within Csys;")  # same tree
        .replace('guarantee G4: "Actuation reports status within one second.";',
                 'guarantee G4: "Actuation reports validated status within one second.";')
    )
    library = cc.ModuleLibrary()
    first = cc.assemble_variant(library, variant1)
    assert all(p is Provenance.NEW for p in first.provenance.values())
    library.store_case(develop_case(first.case, axioms=("M_Csys__A1",)))

    second = cc.assemble_variant(library, variant2)
    cached = sorted(m for m, p in second.provenance.items() if p is Provenance.CACHED)
    fresh = sorted(m for m, p in second.provenance.items() if p is Provenance.NEW)
    assert len(cached) == 6 and len(fresh) == 2
    assert cached == ["M_C1", "M_C2", "M_Csys", "R_r1", "R_r2", "R_r3"]
    assert fresh == ["M_C3", "R_r4"]
    verdict(8, "second assembly of a C3-only variant reports 6 Cached and 2 New modules")


def test_criterion_9_determinism(developed_case, ex_structure, tmp_path):
    renders = (
        lambda: cc.to_dot_architecture(developed_case),
        lambda: cc.to_dot_argument(developed_case,
                                   RenderOptions(view="argument", include_status=True)),
        lambda: cc.to_dot_specgraph(ex_structure),
        lambda: cc.to_report(developed_case),
        lambda: cc.case_to_json(developed_case),
        lambda: cc.to_json(ex_structure),
        lambda: cc.serialize(ex_structure),
    )
    for render in renders:
        first, second = render(), render()
        assert first == second
        if first.startswith("digraph"):
            check_dot(first)

    g4_path = tmp_path / "g4.cbd"
    g4_path.write_text(
        EX_PATH.read_text(encoding="utf-8").replace(
            'guarantee G4: "Actuation reports status within one second.";',
            'guarantee G4: "Actuation reports status within two seconds.";',
        ),
        encoding="utf-8",
    )
    case_path = tmp_path / "case.json"
    case_path.write_text(cc.case_to_json(developed_case), encoding="utf-8")
    commands = (
        ("render", str(EX_PATH), "--view", "architecture"),
        ("render", str(case_path), "--view", "argument", "--status"),
        ("render", str(EX_PATH), "--view", "specgraph"),
        ("validate", str(EX_PATH), "--format", "json"),
        ("status", str(case_path)),
        ("impact", str(EX_PATH), str(g4_path)),
        ("fmt", str(EX_PATH)),
        ("fmt", str(g4_path)),
    )
    for argv in commands:
        runs = [
            subprocess.run([sys.executable, "-m", "contractcase", *argv],
                           capture_output=True)
            for _ in range(2)
        ]
        assert runs[0].returncode == runs[1].returncode
        assert runs[0].stdout == runs[1].stdout
        assert runs[0].stderr == runs[1].stderr
    verdict(9, "all renderers and commands emit byte-identical output across runs")
