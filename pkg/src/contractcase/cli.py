"""Command-line entry point.

Pipeline commands over .cbd sources and case JSON files, with stable exit
codes for CI use: 0 success, 1 validation errors or a failed status gate,
2 usage or I/O errors. Every command is reproducible (identical inputs
and flags give identical bytes on stdout) and no command ever mutates its
input files.

Set CONTRACTCASE_COLOR=1 to colorize severities and statuses; anything
else (including unset) keeps output plain.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import dsl, export, reuse
from .architect import (
    ArchitectureError,
    instantiate_component_template,
    instantiate_refinement_template,
)
from .argument import (
    AssuranceCase,
    ClaimStatus,
    architecture_to_dict,
    build_case,
    case_from_json,
    case_to_json,
    evaluate_status,
    inference_to_dict,
    node_to_dict,
)
from .dsl import DslParseError, JsonFormatError
from .model import SpecificationStructure
from .validator import Severity, validate

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2

_COLORS = {"error": "\x1b[31m", "warning": "\x1b[33m", "ok": "\x1b[32m"}
_RESET = "\x1b[0m"


def _color_enabled() -> bool:
    return os.environ.get("CONTRACTCASE_COLOR") == "1"


def _paint(text: str, color: str) -> str:
    if _color_enabled():
        return f"{_COLORS[color]}{text}{_RESET}"
    return text


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_structure(path: str) -> SpecificationStructure:
    text = _read_text(path)
    if path.endswith(".json"):
        return dsl.from_json(text)
    return dsl.parse(text, file=path)


def _load_case(path: str) -> AssuranceCase:
    text = _read_text(path)
    if path.endswith(".json"):
        doc = json.loads(text)
        if isinstance(doc, dict) and "architecture" in doc:
            return case_from_json(text)
        return build_case(dsl.from_json(text))
    return build_case(dsl.parse(text, file=path))


def _print_diagnostics(diagnostics, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps([d.to_dict() for d in diagnostics], indent=2))
        return
    for d in diagnostics:
        severity = _paint(d.severity.value, d.severity.value)
        print(f"{d.code} {severity}: {d.message}")


def _print_parse_errors(exc: DslParseError) -> None:
    for error in exc.errors:
        print(error.render(), file=sys.stderr)


def cmd_validate(args) -> int:
    structure = _load_structure(args.path)
    diagnostics = validate(structure, args.mode)
    if args.format == "json":
        _print_diagnostics(diagnostics, "json")
    elif diagnostics:  # quiet on clean success
        _print_diagnostics(diagnostics, "text")
    return EXIT_FINDINGS if any(d.severity is Severity.ERROR for d in diagnostics) else EXIT_OK


def cmd_compile(args) -> int:
    structure = _load_structure(args.path)
    diagnostics = validate(structure, args.mode)
    if any(d.severity is Severity.ERROR for d in diagnostics):
        _print_diagnostics(diagnostics, "text")
        return EXIT_FINDINGS
    case = build_case(structure, mode=args.mode)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    architecture_doc = {
        "schema_version": dsl.SCHEMA_VERSION,
        "architecture": architecture_to_dict(case.architecture),
    }
    (out / "architecture.json").write_text(
        json.dumps(architecture_doc, indent=2) + "\n", encoding="utf-8"
    )
    for module in case.architecture.component_modules:
        template = instantiate_component_template(case.architecture, module, structure)
        _write_template(out, module.id, template)
    for module in case.architecture.refinement_modules:
        template = instantiate_refinement_template(case.architecture, module, structure)
        _write_template(out, module.id, template)
    return EXIT_OK


def _write_template(out: Path, module_id: str, template) -> None:
    doc = {
        "schema_version": dsl.SCHEMA_VERSION,
        "module": template.module_id,
        "nodes": [node_to_dict(n) for n in template.nodes],
        "inferences": [inference_to_dict(i) for i in template.inferences],
        "scope": {n.id: template.scope_of(n.id) for n in template.nodes},
    }
    (out / f"{module_id}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def cmd_render(args) -> int:
    case = _load_case(args.path)
    if args.view == "architecture":
        sys.stdout.write(export.to_dot_architecture(case))
    elif args.view == "specgraph":
        sys.stdout.write(export.to_dot_specgraph(case.structure))
    else:
        options = export.RenderOptions(
            view="argument",
            module_filter=frozenset(args.module) if args.module else None,
            include_status=args.status,
        )
        sys.stdout.write(export.to_dot_argument(case, options))
    return EXIT_OK


def cmd_status(args) -> int:
    case = _load_case(args.path)
    sys.stdout.write(export.to_report(case))
    status = evaluate_status(case)
    root_ids = {c.id for c in case.structure.roots()}
    gate_ok = True
    for module in case.architecture.component_modules:
        if module.component not in root_ids:
            continue
        for ref in module.interface_conclusions:
            if status[ref.claim] is not ClaimStatus.SUPPORTED:
                gate_ok = False
    return EXIT_OK if gate_ok else EXIT_FINDINGS


def cmd_impact(args) -> int:
    old_case = _load_case(args.old)
    new_structure = _load_structure(args.new)
    diff = reuse.diff_structures(old_case.structure, new_structure)
    report = reuse.impact(old_case, diff)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
        return EXIT_OK
    doc = report.to_dict()
    for section in ("reusable", "needs_reverification", "new", "removed"):
        label = section.replace("_", "-")
        print(f"{label}: {', '.join(doc[section]) if doc[section] else '-'}")
    return EXIT_OK


def cmd_assemble(args) -> int:
    structure = _load_structure(args.path)
    library = reuse.ModuleLibrary.load(args.library)
    result = reuse.assemble_variant(library, structure)
    for module_id in sorted(result.provenance):
        print(f"{module_id}: {result.provenance[module_id].value}")
    if args.store:
        library.store_case(result.case, evaluate_status(result.case))
        library.save(args.library)
    if args.out:
        Path(args.out).write_text(case_to_json(result.case), encoding="utf-8")
    return EXIT_OK


def cmd_concerns(args) -> int:
    case = _load_case(args.path)
    for module_id in sorted(reuse.concern_modules(case, args.name)):
        print(module_id)
    return EXIT_OK


def cmd_fmt(args) -> int:
    structure = _load_structure(args.path)
    sys.stdout.write(dsl.serialize(structure))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contractcase",
        description="Compile contract-based specification structures into "
                    "modular assurance case architectures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check well-formedness rules W1..W9")
    p.add_argument("path")
    p.add_argument("--mode", choices=["strict", "lenient"], default="strict")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="derive the architecture and module templates")
    p.add_argument("path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mode", choices=["strict", "lenient"], default="strict")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("render", help="emit a DOT diagram on stdout")
    p.add_argument("path", help=".cbd source, structure JSON, or case JSON")
    p.add_argument("--view", choices=list(export.VIEWS), default="architecture")
    p.add_argument("--status", action="store_true", help="append claim statuses to labels")
    p.add_argument("--module", action="append", help="restrict the argument view; repeatable")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("status", help="report claim statuses; exit 1 unless all "
                                      "root guarantees are Supported")
    p.add_argument("path")
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("impact", help="change-impact analysis between two versions")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_impact)

    p = sub.add_parser("assemble", help="assemble a variant against a module library")
    p.add_argument("library", help="library directory")
    p.add_argument("path")
    p.add_argument("--out", help="write the assembled case JSON here")
    p.add_argument("--store", action="store_true",
                   help="store the assembled modules back into the library")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("concerns", help="list the modules contributing to a concern")
    p.add_argument("path")
    p.add_argument("name")
    p.set_defaults(func=cmd_concerns)

    p = sub.add_parser("fmt", help="canonicalize DSL source to stdout")
    p.add_argument("path")
    p.set_defaults(func=cmd_fmt)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DslParseError as exc:
        _print_parse_errors(exc)
        return EXIT_FINDINGS
    except ArchitectureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (JsonFormatError, dsl.SerializeError, export.RenderError,
            reuse.LibraryError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
