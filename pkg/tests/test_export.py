from __future__ import annotations

import pytest

import contractcase as cc
from contractcase import RenderOptions
from dotcheck import check_dot


def test_architecture_dot(ex_case):
    dot = cc.to_dot_architecture(ex_case)
    nodes, edges = check_dot(dot)
    assert nodes == 8
    assert edges == 8
    assert dot.count("shape=tab") == 4
    assert dot.count("shape=component") == 4
    assert '"M_C3" -> "R_r4";' in dot
    assert '"R_r4" -> "M_Csys";' in dot
    assert cc.to_dot_architecture(ex_case) == dot
    assert cc.to_dot_architecture(ex_case.architecture) == dot


def test_architecture_dot_single_module():
    structure = cc.parse('component C;\ncontract K for C { guarantee G: "g"; }\n')
    dot = cc.to_dot_architecture(cc.derive_architecture(structure))
    nodes, edges = check_dot(dot)
    assert (nodes, edges) == (1, 0)


def test_argument_dot_component_module(ex_case):
    options = RenderOptions(view="argument", module_filter=frozenset({"M_Csys"}))
    dot = cc.to_dot_argument(ex_case, options)
    check_dot(dot)
    assert dot.count("[shape=box label=") == 3  # A1, A5 premises + G1 conclusion
    assert dot.count("shape=parallelogram") == 1
    assert dot.count("shape=ellipse") == 1
    assert dot.count("style=rounded") == 1  # the context node
    assert dot.count(" (J)") == 1


def test_argument_dot_refinement_module(ex_case):
    options = RenderOptions(view="argument", module_filter=frozenset({"R_r4"}))
    dot = cc.to_dot_argument(ex_case, options)
    check_dot(dot)
    assert dot.count("[shape=box label=") == 2  # premise + conclusion
    assert dot.count("shape=parallelogram") == 1
    assert dot.count("shape=ellipse") == 1
    assert dot.count("style=rounded") == 0


def test_argument_dot_status_labels(developed_case):
    options = RenderOptions(view="argument", include_status=True)
    dot = cc.to_dot_argument(developed_case, options)
    check_dot(dot)
    g1_line = next(line for line in dot.splitlines() if '"M_Csys__G1"' in line and "label" in line)
    assert "[Supported]" in g1_line
    a1_line = next(line for line in dot.splitlines() if '"M_Csys__A1"' in line and "label" in line)
    assert "[Assumed]" in a1_line


def test_argument_dot_counts_match_model(developed_case):
    dot = cc.to_dot_argument(developed_case, RenderOptions(view="argument"))
    nodes, _ = check_dot(dot)
    assert nodes == len(developed_case.nodes)
    for node in developed_case.nodes:
        assert f'"{node.id}"' in dot


def test_argument_dot_renders_bindings_between_selected_modules(ex_case):
    options = RenderOptions(view="argument", module_filter=frozenset({"M_C3", "R_r4"}))
    dot = cc.to_dot_argument(ex_case, options)
    assert '"M_C3__G4" -> "R_r4__G4" [penwidth=2];' in dot
    solo = cc.to_dot_argument(ex_case, RenderOptions(view="argument",
                                                     module_filter=frozenset({"R_r4"})))
    assert "penwidth" not in solo


def test_argument_dot_rejects_unknown_filter(ex_case):
    with pytest.raises(cc.RenderError, match="M_Nope"):
        cc.to_dot_argument(ex_case, RenderOptions(view="argument",
                                                  module_filter=frozenset({"M_Nope"})))


def test_render_options_validation():
    with pytest.raises(cc.RenderError):
        RenderOptions(view="3d")


def test_specgraph_dot(ex_structure):
    dot = cc.to_dot_specgraph(ex_structure)
    nodes, edges = check_dot(dot)
    assert nodes == 9
    assert edges == 9
    assert dot.count('[label="a"]') == 5
    assert dot.count('[label="r"]') == 4


def test_dot_escaping():
    structure = cc.parse(
        'component C;\ncontract K for C { guarantee G: "say \\"hi\\" \\\\ now"; }\n'
    )
    case = cc.build_case(structure)
    dot = cc.to_dot_argument(case, RenderOptions(view="argument"))
    check_dot(dot)
    assert 'say \\"hi\\" \\\\ now' in dot


def test_report_fresh_case(ex_case):
    report = cc.to_report(ex_case)
    assert "G1: Unsupported" in report
    for module_id in ex_case.architecture.module_ids():
        assert module_id in report
    # Every fresh module still has its strategy and justification placeholders.
    for line in report.splitlines():
        if line.strip().startswith(("M_", "R_")):
            assert line.split()[-2] != "0"
    assert "Undeveloped modules: " in report


def test_report_developed_case(developed_case):
    report = cc.to_report(developed_case)
    assert "G1: Supported; assumed leaves: 1 (A1)" in report
    assert "Undeveloped modules" not in report


def test_report_flags_missing_justification(developed_case):
    case = cc.remove_node(developed_case, "R_r4__J")
    report = cc.to_report(case)
    assert "G1: Undefined" in report
    assert "Undeveloped modules: R_r4" in report


def test_renderers_are_deterministic(developed_case, ex_structure):
    for render in (
        lambda: cc.to_dot_architecture(developed_case),
        lambda: cc.to_dot_argument(developed_case, RenderOptions(view="argument",
                                                                 include_status=True)),
        lambda: cc.to_dot_specgraph(ex_structure),
        lambda: cc.to_report(developed_case),
        lambda: cc.case_to_json(developed_case),
    ):
        assert render() == render()
