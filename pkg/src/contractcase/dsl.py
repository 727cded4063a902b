"""Text front-end for specification structures.

Concrete syntax (file extension ``.cbd``, UTF-8, ``#`` comments to end of line):

    component Csys;
    component C1 within Csys;
    contract K1 for C1 {
      assume A1: "statement";
      guarantee G1: "statement";
    }
    refine r1: A1 -> A2;
    concern safety covers G1, G3;

String literals are double-quoted; the only escapes are ``\\"`` and ``\\\\``.
``parse`` raises :class:`DslParseError` carrying every diagnostic found;
``serialize`` emits the canonical form (components in tree preorder,
contracts by component preorder then id, refinements by id, concerns by
name) and is a one-step fixpoint of ``parse``.

The JSON form is lossless (declaration order preserved) and carries a
top-level ``schema_version`` of "1".
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import (
    Component,
    Concern,
    Contract,
    ModelError,
    Refinement,
    SpecificationStructure,
    Specification,
    SpecKind,
    unresolved_references,
)

SCHEMA_VERSION = "1"

# Error codes are stable public API. E003 is reserved for unresolved
# references, which this front-end leaves to the validator (rule W1), so
# the parser itself never emits it.
E_UNEXPECTED_TOKEN = "E001"
E_DUPLICATE_ID = "E002"
E_UNRESOLVED_REFERENCE = "E003"
E_MALFORMED_STRING = "E004"

_KEYWORDS = frozenset(
    {"component", "within", "contract", "for", "assume", "guarantee", "refine", "concern", "covers"}
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    code: str
    message: str

    def render(self) -> str:
        s = self.span
        return f"{s.file}:{s.line}:{s.column}: {self.code}: {self.message}"


class DslParseError(Exception):
    """Raised by parse(); carries every ParseError found in the input."""

    def __init__(self, errors: list[ParseError]):
        super().__init__("\n".join(e.render() for e in errors))
        self.errors = list(errors)


class SerializeError(Exception):
    """Serialization refused, e.g. because the structure has dangling references."""


class JsonFormatError(Exception):
    """A JSON document does not match the structure schema."""


@dataclass(frozen=True)
class _Token:
    type: str  # "ident", "keyword", "string", punctuation literal, or "eof"
    value: str
    line: int
    column: int
    length: int


class _Lexer:
    def __init__(self, source: str, file: str):
        self.source = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.column = 1
        self.errors: list[ParseError] = []

    def _error(self, code: str, message: str, line: int, column: int, length: int = 1) -> None:
        self.errors.append(ParseError(SourceSpan(self.file, line, column, max(1, length)), code, message))

    def _advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\r":
            # Treat \r\n as a single break so positions are newline-agnostic.
            if self.pos < len(self.source) and self.source[self.pos] == "\n":
                self.pos += 1
            self.line += 1
            self.column = 1
        elif ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def _peek(self) -> str:
        return self.source[self.pos] if self.pos < len(self.source) else ""

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        while self.pos < len(self.source):
            ch = self._peek()
            if ch in " \t\r\n":
                self._advance()
                continue
            if ch == "#":
                while self.pos < len(self.source) and self._peek() not in "\r\n":
                    self._advance()
                continue
            line, column = self.line, self.column
            if ch == '"':
                out.append(self._string(line, column))
                continue
            if ch.isalpha() or ch == "_":
                start = self.pos
                while self.pos < len(self.source) and (self._peek().isalnum() or self._peek() == "_"):
                    self._advance()
                word = self.source[start:self.pos]
                kind = "keyword" if word in _KEYWORDS else "ident"
                out.append(_Token(kind, word, line, column, len(word)))
                continue
            if ch == "-" and self.pos + 1 < len(self.source) and self.source[self.pos + 1] == ">":
                self._advance()
                self._advance()
                out.append(_Token("->", "->", line, column, 2))
                continue
            if ch in ";:{},":
                self._advance()
                out.append(_Token(ch, ch, line, column, 1))
                continue
            self._advance()
            self._error(E_UNEXPECTED_TOKEN, f"unexpected character {ch!r}", line, column)
        out.append(_Token("eof", "", self.line, max(1, self.column - 1), 1))
        return out

    def _string(self, line: int, column: int) -> _Token:
        start = self.pos
        self._advance()  # opening quote
        value: list[str] = []
        while True:
            if self.pos >= len(self.source) or self._peek() in "\r\n":
                self._error(E_MALFORMED_STRING, "unterminated string literal", line, column,
                            self.pos - start)
                break
            ch = self._advance()
            if ch == '"':
                break
            if ch == "\\":
                if self.pos >= len(self.source) or self._peek() in "\r\n":
                    self._error(E_MALFORMED_STRING, "unterminated string literal", line, column,
                                self.pos - start)
                    break
                esc = self._advance()
                if esc not in ('"', "\\"):
                    self._error(E_MALFORMED_STRING, f"invalid escape '\\{esc}'", line, column,
                                self.pos - start)
                    continue
                value.append(esc)
            else:
                value.append(ch)
        return _Token("string", "".join(value), line, column, max(1, self.pos - start))


class _Parser:
    def __init__(self, tokens: list[_Token], file: str, errors: list[ParseError]):
        self.tokens = tokens
        self.file = file
        self.errors = errors
        self.pos = 0
        self.components: list[Component] = []
        self.contracts: list[Contract] = []
        self.refinements: list[Refinement] = []
        self.concerns: list[Concern] = []
        # One registry per element kind; specifications share a single kind.
        self.declared: dict[str, dict[str, _Token]] = {
            "component": {}, "contract": {}, "specification": {}, "refinement": {}, "concern": {},
        }

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.type != "eof":
            self.pos += 1
        return tok

    def _span(self, tok: _Token) -> SourceSpan:
        return SourceSpan(self.file, tok.line, tok.column, tok.length)

    def _error(self, tok: _Token, code: str, message: str) -> None:
        self.errors.append(ParseError(self._span(tok), code, message))

    def _expect(self, type_: str, what: str) -> _Token | None:
        tok = self._peek()
        if tok.type != type_:
            shown = tok.value or "end of input"
            self._error(tok, E_UNEXPECTED_TOKEN, f"expected {what}, found {shown!r}")
            return None
        return self._next()

    def _expect_keyword(self, word: str) -> _Token | None:
        tok = self._peek()
        if tok.type != "keyword" or tok.value != word:
            shown = tok.value or "end of input"
            self._error(tok, E_UNEXPECTED_TOKEN, f"expected '{word}', found {shown!r}")
            return None
        return self._next()

    def _sync(self, *, in_block: bool = False) -> None:
        # Panic-mode recovery: skip to the next ';' (consumed) or a brace.
        while True:
            tok = self._peek()
            if tok.type == "eof":
                return
            if tok.type == ";":
                self._next()
                return
            if tok.type == "}" or (in_block and tok.type == "{"):
                return
            self._next()

    def _declare(self, kind: str, tok: _Token) -> bool:
        prior = self.declared[kind].get(tok.value)
        if prior is not None:
            self._error(tok, E_DUPLICATE_ID,
                        f"duplicate {kind} id '{tok.value}' (first declared at line {prior.line})")
            return False
        self.declared[kind][tok.value] = tok
        return True

    def parse(self) -> SpecificationStructure:
        while self._peek().type != "eof":
            tok = self._peek()
            if tok.type != "keyword":
                self._error(tok, E_UNEXPECTED_TOKEN, f"expected a declaration, found {tok.value!r}")
                self._sync()
                continue
            if tok.value == "component":
                self._component()
            elif tok.value == "contract":
                self._contract()
            elif tok.value == "refine":
                self._refinement()
            elif tok.value == "concern":
                self._concern()
            else:
                self._error(tok, E_UNEXPECTED_TOKEN, f"expected a declaration, found {tok.value!r}")
                self._sync()
        return SpecificationStructure(
            components=tuple(self.components),
            contracts=tuple(self.contracts),
            refinements=tuple(self.refinements),
            concerns=tuple(self.concerns),
        )

    def _component(self) -> None:
        self._next()  # "component"
        name = self._expect("ident", "component id")
        if name is None:
            self._sync()
            return
        parent: _Token | None = None
        if self._peek().type == "keyword" and self._peek().value == "within":
            self._next()
            parent = self._expect("ident", "parent component id")
            if parent is None:
                self._sync()
                return
        if self._expect(";", "';'") is None:
            self._sync()
            return
        if self._declare("component", name):
            self.components.append(Component(id=name.value, parent=parent.value if parent else None))

    def _spec_decl(self, keyword: str, kind: SpecKind) -> Specification | None:
        self._next()  # "assume" or "guarantee"
        name = self._expect("ident", f"{keyword} id")
        if name is None or self._expect(":", "':'") is None:
            self._sync(in_block=True)
            return None
        text = self._expect("string", "quoted statement")
        if text is None or self._expect(";", "';'") is None:
            self._sync(in_block=True)
            return None
        if not self._declare("specification", name):
            return None
        if not text.value:
            self._error(text, E_MALFORMED_STRING, f"{keyword} {name.value}: statement must be nonempty")
            return None
        return Specification(id=name.value, kind=kind, text=text.value)

    def _contract(self) -> None:
        self._next()  # "contract"
        name = self._expect("ident", "contract id")
        if name is None:
            self._sync()
            return
        if self._expect_keyword("for") is None:
            self._sync()
            return
        owner = self._expect("ident", "component id")
        if owner is None or self._expect("{", "'{'") is None:
            self._sync()
            return
        assumptions: list[Specification] = []
        guarantee: Specification | None = None
        while True:
            tok = self._peek()
            if tok.type == "}":
                self._next()
                break
            if tok.type == "eof":
                self._error(tok, E_UNEXPECTED_TOKEN, "expected '}' before end of input")
                break
            if tok.type == "keyword" and tok.value == "assume":
                if guarantee is not None:
                    self._error(tok, E_UNEXPECTED_TOKEN, "assumptions must precede the guarantee")
                    self._sync(in_block=True)
                    continue
                spec = self._spec_decl("assume", SpecKind.ASSUMPTION)
                if spec is not None:
                    assumptions.append(spec)
            elif tok.type == "keyword" and tok.value == "guarantee":
                spec = self._spec_decl("guarantee", SpecKind.GUARANTEE)
                if spec is not None:
                    if guarantee is not None:
                        self._error(tok, E_UNEXPECTED_TOKEN,
                                    f"contract {name.value} already has a guarantee")
                    else:
                        guarantee = spec
            else:
                self._error(tok, E_UNEXPECTED_TOKEN,
                            f"expected 'assume', 'guarantee' or '}}', found {tok.value!r}")
                self._sync(in_block=True)
        ok = self._declare("contract", name)
        if guarantee is None:
            self._error(name, E_UNEXPECTED_TOKEN, f"contract {name.value} must declare a guarantee")
            return
        if ok:
            self.contracts.append(
                Contract(id=name.value, component=owner.value,
                         assumptions=tuple(assumptions), guarantee=guarantee)
            )

    def _refinement(self) -> None:
        self._next()  # "refine"
        name = self._expect("ident", "refinement id")
        if name is None or self._expect(":", "':'") is None:
            self._sync()
            return
        source = self._expect("ident", "source specification id")
        if source is None or self._expect("->", "'->'") is None:
            self._sync()
            return
        target = self._expect("ident", "target specification id")
        if target is None or self._expect(";", "';'") is None:
            self._sync()
            return
        if not self._declare("refinement", name):
            return
        if source.value == target.value:
            self._error(target, E_UNEXPECTED_TOKEN,
                        f"refinement {name.value}: source and target must differ")
            return
        self.refinements.append(Refinement(id=name.value, source=source.value, target=target.value))

    def _concern(self) -> None:
        self._next()  # "concern"
        name = self._expect("ident", "concern name")
        if name is None:
            self._sync()
            return
        if self._expect_keyword("covers") is None:
            self._sync()
            return
        covers: list[str] = []
        first = self._expect("ident", "guarantee id")
        if first is None:
            self._sync()
            return
        covers.append(first.value)
        while self._peek().type == ",":
            self._next()
            nxt = self._expect("ident", "guarantee id")
            if nxt is None:
                self._sync()
                return
            covers.append(nxt.value)
        if self._expect(";", "';'") is None:
            self._sync()
            return
        if self._declare("concern", name):
            self.concerns.append(Concern(name=name.value, covers=tuple(covers)))


def parse(source: str, file: str = "<input>") -> SpecificationStructure:
    """Parse DSL text into a structure; deterministic; raises DslParseError on any error."""
    lexer = _Lexer(source, file)
    tokens = lexer.tokens()
    parser = _Parser(tokens, file, lexer.errors)
    structure = parser.parse()
    if parser.errors:
        parser.errors.sort(key=lambda e: (e.span.line, e.span.column, e.code))
        raise DslParseError(parser.errors)
    return structure


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize(structure: SpecificationStructure) -> str:
    """Canonical DSL text for a structure; refuses dangling references."""
    dangling = unresolved_references(structure)
    if dangling:
        listed = "; ".join(f"'{ident}' in {site}" for ident, site in dangling)
        raise SerializeError(f"cannot serialize structure with unresolved references: {listed}")

    order = structure.preorder()
    rank = {comp.id: i for i, comp in enumerate(order)}
    sections: list[str] = []

    if order:
        lines = []
        for comp in order:
            suffix = f" within {comp.parent}" if comp.parent else ""
            lines.append(f"component {comp.id}{suffix};")
        sections.append("\n".join(lines))

    for contract in sorted(structure.contracts, key=lambda k: (rank.get(k.component, len(rank)), k.id)):
        lines = [f"contract {contract.id} for {contract.component} {{"]
        for spec in contract.assumptions:
            lines.append(f"  assume {spec.id}: {_quote(spec.text)};")
        lines.append(f"  guarantee {contract.guarantee.id}: {_quote(contract.guarantee.text)};")
        lines.append("}")
        sections.append("\n".join(lines))

    if structure.refinements:
        sections.append("\n".join(
            f"refine {r.id}: {r.source} -> {r.target};"
            for r in sorted(structure.refinements, key=lambda r: r.id)
        ))

    if structure.concerns:
        sections.append("\n".join(
            f"concern {c.name} covers {', '.join(sorted(c.covers))};"
            for c in sorted(structure.concerns, key=lambda c: c.name)
        ))

    return "\n\n".join(sections) + "\n" if sections else ""


def structure_to_dict(structure: SpecificationStructure) -> dict:
    """JSON-ready dict preserving declaration order exactly (lossless)."""
    return {
        "components": [
            {"id": c.id, "parent": c.parent, "name": c.name, "description": c.description}
            for c in structure.components
        ],
        "contracts": [
            {
                "id": k.id,
                "component": k.component,
                "assumptions": [{"id": s.id, "text": s.text} for s in k.assumptions],
                "guarantee": {"id": k.guarantee.id, "text": k.guarantee.text},
            }
            for k in structure.contracts
        ],
        "refinements": [
            {"id": r.id, "source": r.source, "target": r.target} for r in structure.refinements
        ],
        "concerns": [{"name": c.name, "covers": list(c.covers)} for c in structure.concerns],
    }


def _require(mapping: dict, key: str, where: str):
    if not isinstance(mapping, dict) or key not in mapping:
        raise JsonFormatError(f"{where}: missing required field '{key}'")
    return mapping[key]


def structure_from_dict(doc: dict) -> SpecificationStructure:
    try:
        components = tuple(
            Component(
                id=_require(c, "id", "component"),
                parent=c.get("parent"),
                name=c.get("name", ""),
                description=c.get("description", ""),
            )
            for c in _require(doc, "components", "document")
        )
        contracts = tuple(
            Contract(
                id=_require(k, "id", "contract"),
                component=_require(k, "component", "contract"),
                assumptions=tuple(
                    Specification(
                        id=_require(s, "id", "assumption"),
                        kind=SpecKind.ASSUMPTION,
                        text=_require(s, "text", "assumption"),
                    )
                    for s in _require(k, "assumptions", "contract")
                ),
                guarantee=Specification(
                    id=_require(_require(k, "guarantee", "contract"), "id", "guarantee"),
                    kind=SpecKind.GUARANTEE,
                    text=_require(_require(k, "guarantee", "contract"), "text", "guarantee"),
                ),
            )
            for k in _require(doc, "contracts", "document")
        )
        refinements = tuple(
            Refinement(
                id=_require(r, "id", "refinement"),
                source=_require(r, "source", "refinement"),
                target=_require(r, "target", "refinement"),
            )
            for r in _require(doc, "refinements", "document")
        )
        concerns = tuple(
            Concern(
                name=_require(c, "name", "concern"),
                covers=tuple(_require(c, "covers", "concern")),
            )
            for c in _require(doc, "concerns", "document")
        )
    except ModelError as exc:
        raise JsonFormatError(f"malformed document: {exc}") from exc
    except TypeError as exc:
        raise JsonFormatError(f"malformed document: {exc}") from exc
    return SpecificationStructure(components, contracts, refinements, concerns)


def check_schema_version(doc: object) -> dict:
    if not isinstance(doc, dict):
        raise JsonFormatError("document root must be a JSON object")
    if "schema_version" not in doc:
        raise JsonFormatError("missing required field 'schema_version'")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise JsonFormatError(
            f"unsupported schema_version {doc['schema_version']!r} (expected {SCHEMA_VERSION!r})"
        )
    return doc


def to_json(structure: SpecificationStructure) -> str:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(structure_to_dict(structure))
    return json.dumps(doc, indent=2) + "\n"


def from_json(text: str) -> SpecificationStructure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JsonFormatError(f"malformed document: {exc}") from exc
    return structure_from_dict(check_schema_version(doc))
