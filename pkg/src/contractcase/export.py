"""Deterministic renderers: DOT diagrams and the plain-text status report.

All output is byte-stable: nodes and edges are emitted in sorted order and
nothing depends on wall-clock time or hash randomization. Diagram arrows
run from premises toward conclusions in every view, matching the direction
of the assumption-of and refinement relations, so the pictures read the
same way the reasoning does.

Shape conventions (standard DOT vocabulary, since exact GSN glyphs are not
expressible): component modules are tabs and refinement modules are
component shapes in the architecture view; in argument views claims are
boxes, strategies parallelograms, justifications ellipses suffixed " (J)",
contexts rounded boxes, and evidence circles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .architect import AssuranceArchitecture, NodeKind
from .argument import AssuranceCase, ClaimStatus, Trace, evaluate_status, trace
from .model import EdgeKind, SpecificationStructure, SpecKind, build_graph

VIEWS = ("architecture", "argument", "specgraph")


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class RenderOptions:
    view: str = "architecture"
    module_filter: frozenset[str] | None = None
    include_status: bool = False

    def __post_init__(self) -> None:
        if self.view not in VIEWS:
            raise RenderError(f"view must be one of {VIEWS}, got {self.view!r}")
        if self.module_filter is not None:
            object.__setattr__(self, "module_filter", frozenset(self.module_filter))


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def to_dot_architecture(source: AssuranceCase | AssuranceArchitecture) -> str:
    architecture = source.architecture if isinstance(source, AssuranceCase) else source
    lines = ["digraph assurance_architecture {", "  rankdir=LR;"]
    shapes = {m.id: "tab" for m in architecture.component_modules}
    shapes.update({m.id: "component" for m in architecture.refinement_modules})
    for module_id in sorted(shapes):
        lines.append(f'  "{module_id}" [shape={shapes[module_id]}];')
    edges = sorted({(b.from_module, b.to_module) for b in architecture.bindings})
    for from_module, to_module in edges:
        lines.append(f'  "{from_module}" -> "{to_module}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


_NODE_ATTRS = {
    NodeKind.CLAIM: "shape=box",
    NodeKind.STRATEGY: "shape=parallelogram",
    NodeKind.JUSTIFICATION: "shape=ellipse",
    NodeKind.CONTEXT: "shape=box style=rounded",
    NodeKind.EVIDENCE: "shape=circle",
}


def _node_label(node, status: dict[str, ClaimStatus] | None) -> str:
    if node.kind is NodeKind.EVIDENCE:
        label = node.artifact
    elif node.kind is NodeKind.JUSTIFICATION:
        label = node.text + " (J)"
    else:
        label = node.text
    if status is not None and node.kind is NodeKind.CLAIM and node.id in status:
        label += f" [{status[node.id].value}]"
    return label


def to_dot_argument(case: AssuranceCase, options: RenderOptions | None = None) -> str:
    """Argument view: one cluster per module, inference and binding edges."""
    options = options or RenderOptions(view="argument")
    known = set(case.architecture.module_ids())
    if options.module_filter is not None:
        missing = sorted(options.module_filter - known)
        if missing:
            raise RenderError(f"unknown module ids in filter: {', '.join(missing)}")
        selected = options.module_filter
    else:
        selected = known
    status = evaluate_status(case) if options.include_status else None

    lines = ["digraph assurance_argument {", "  rankdir=TB;"]
    for module_id in sorted(selected):
        lines.append(f'  subgraph "cluster_{module_id}" {{')
        lines.append(f'    label="{module_id}";')
        for node in sorted(case.module_nodes(module_id), key=lambda n: n.id):
            attrs = _NODE_ATTRS[node.kind]
            label = _escape(_node_label(node, status))
            lines.append(f'    "{node.id}" [{attrs} label="{label}"];')
        lines.append("  }")

    node_module = {n.id: n.module for n in case.nodes}
    edge_lines: set[str] = set()
    for inf in case.inferences:
        if node_module[inf.conclusion] not in selected:
            continue
        for premise in inf.premises:
            edge_lines.add(f'  "{premise}" -> "{inf.strategy}";')
        edge_lines.add(f'  "{inf.strategy}" -> "{inf.conclusion}";')
        if inf.justification:
            edge_lines.add(f'  "{inf.justification}" -> "{inf.strategy}" [style=dashed];')
        for ctx in inf.contexts:
            edge_lines.add(f'  "{ctx}" -> "{inf.strategy}" [style=dotted];')
    for node in case.nodes:
        if node.kind is NodeKind.EVIDENCE and node.module in selected:
            edge_lines.add(f'  "{node.id}" -> "{node.supports}";')
    for binding in case.bindings:
        if binding.from_module in selected and binding.to_module in selected:
            edge_lines.add(f'  "{binding.from_claim}" -> "{binding.to_claim}" [penwidth=2];')
    lines.extend(sorted(edge_lines))
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot_specgraph(structure: SpecificationStructure) -> str:
    """Specification graph view: a-edges and r-edges between specifications."""
    graph = build_graph(structure)
    specs = structure.specifications()
    lines = ["digraph specification_structure {", "  rankdir=LR;"]
    for spec_id in sorted(graph.nodes):
        shape = "box" if specs[spec_id].kind is SpecKind.GUARANTEE else "ellipse"
        lines.append(f'  "{spec_id}" [shape={shape}];')
    for edge in graph.sorted_edges():
        label = "a" if edge.kind is EdgeKind.ASSUMPTION_OF else "r"
        lines.append(f'  "{edge.source}" -> "{edge.target}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _undeveloped_count(case: AssuranceCase, module_id: str) -> int:
    nodes = case.module_nodes(module_id)
    count = sum(1 for n in nodes if not n.developed)
    node_ids = {n.id for n in nodes}
    count += sum(
        1 for i in case.inferences if i.conclusion in node_ids and i.justification is None
    )
    return count


def to_report(case: AssuranceCase) -> str:
    """Human-readable status report.

    Top section: each root guarantee with its status and the assumed leaves
    (axioms) in its trace. Then one row per module: conclusions with their
    statuses, undeveloped placeholder count, and the module's own assumed
    leaf count.
    """
    status = evaluate_status(case)
    claim_spec = case.claim_spec_map()
    lines = ["Assurance case report", "=====================", ""]

    roots = case.structure.roots()
    root_ids = {c.id for c in roots}
    root_modules = [m for m in case.architecture.component_modules if m.component in root_ids]
    lines.append("Root guarantees:")
    if not root_modules:
        lines.append("  (none)")
    for module in root_modules:
        for ref in module.interface_conclusions:
            tr = trace(case, ref.claim)
            assumed = sorted(
                claim_spec.get(n.id, n.id)
                for n in tr.nodes
                if n.id in case.axioms
            )
            suffix = f" ({', '.join(assumed)})" if assumed else ""
            lines.append(
                f"  {ref.spec}: {status[ref.claim].value}; "
                f"assumed leaves: {len(assumed)}{suffix}"
            )
    lines.append("")

    rows: list[tuple[str, str, str, str, str]] = []
    for module in case.architecture.component_modules:
        conclusions = ", ".join(
            f"{ref.spec}: {status[ref.claim].value}" for ref in module.interface_conclusions
        )
        axiom_count = sum(1 for n in case.module_nodes(module.id) if n.id in case.axioms)
        rows.append((module.id, "component", conclusions,
                     str(_undeveloped_count(case, module.id)), str(axiom_count)))
    for module in case.architecture.refinement_modules:
        conclusion = f"{module.conclusion_spec}: {status[module.conclusion_claim].value}"
        axiom_count = sum(1 for n in case.module_nodes(module.id) if n.id in case.axioms)
        rows.append((module.id, "refinement", conclusion,
                     str(_undeveloped_count(case, module.id)), str(axiom_count)))

    header = ("module", "kind", "conclusions", "placeholders", "assumed")
    widths = [max(len(row[i]) for row in rows + [header]) for i in range(5)] if rows else [0] * 5
    lines.append("Modules:")
    if rows:
        lines.append("  " + "  ".join(header[i].ljust(widths[i]) for i in range(5)).rstrip())
        for row in rows:
            lines.append("  " + "  ".join(row[i].ljust(widths[i]) for i in range(5)).rstrip())
    else:
        lines.append("  (none)")

    undeveloped = sorted(
        module_id for module_id in case.architecture.module_ids()
        if _undeveloped_count(case, module_id) > 0
    )
    if undeveloped:
        lines.append("")
        lines.append("Undeveloped modules: " + ", ".join(undeveloped))
    return "\n".join(lines) + "\n"


def trace_to_text(tr: Trace) -> str:
    """Plain listing of a trace, mostly for CLI debugging."""
    lines = [f"trace of {tr.claim}:"]
    lines += [f"  node {n.id} [{n.kind.value}]" for n in tr.nodes]
    lines += [f"  inference -> {i.conclusion} (premises: {', '.join(i.premises) or '-'})"
              for i in tr.inferences]
    lines += [f"  binding {b.from_claim} -> {b.to_claim}" for b in tr.bindings]
    return "\n".join(lines) + "\n"
