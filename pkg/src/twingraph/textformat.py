"""Text serialization of graphs: a closed Turtle-style subset (.rht.ttl).

Grammar (no blank nodes, collections, language tags, multi-line strings, or
relative IRIs):

    doc      := (prefix | triple | comment | blank)*
    prefix   := '@prefix' NAME ':' '<' IRI '>' '.'
    triple   := subject predicate-list '.'
    predlist := pred objlist (';' pred objlist)*
    objlist  := object (',' object)*
    subject  := iriref | curie
    pred     := 'a' | curie | iriref
    object   := iriref | curie | literal
    literal  := '"' chars '"' ('^^' curie)? | number
    comment  := '#' to end of line

Parsing runs two passes over the raw triples: node type assertions ('a')
first, then statements, so forward references inside one document are legal.
Diagnostics carry 1-based line:column positions; any error means no graph is
returned.

Emission is canonical and byte-stable: prefixes sorted by name, subjects by
expanded IRI, 'a' types first, properties by id, objects sorted, one subject
block per node, LF line endings, trailing newline. The parser also accepts
CRLF input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import namespaces as ns
from .errors import (
    ParseDiagnostic,
    SEVERITY_ERROR,
    SEVERITY_WARNING,
    StatementViolationError,
    UnknownObjectError,
    UnknownSubjectError,
    has_errors,
)
from .graph import Graph, Iri, Literal, ViolationReason
from .ontology import LITERAL_KINDS, Registry

FILE_EXTENSION = ".rht.ttl"

_LOCAL_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.%~/-")
_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
_UNESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


# --- tokens ---

AT_PREFIX = "@prefix"
IRIREF = "iriref"
PNAME = "pname"
WORD_A = "a"
STRING = "string"
NUMBER = "number"
DTSEP = "^^"
PUNCT = "punct"
EOF = "eof"
BAD = "bad"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    prefix: str = ""
    local: str = ""


def _tokenize(text: str) -> tuple[list[Token], list[ParseDiagnostic]]:
    tokens: list[Token] = []
    diagnostics: list[ParseDiagnostic] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def err(message, at_line, at_col):
        diagnostics.append(ParseDiagnostic(at_line, at_col, SEVERITY_ERROR, message))

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "@":
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            word = text[i + 1:j]
            if word == "prefix":
                tokens.append(Token(AT_PREFIX, "@prefix", start_line, start_col))
            else:
                err(f"unknown directive @{word}", start_line, start_col)
                tokens.append(Token(BAD, "@" + word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "<":
            j = i + 1
            while j < n and text[j] not in ">\n":
                j += 1
            if j >= n or text[j] == "\n":
                err("unterminated IRI reference", start_line, start_col)
                tokens.append(Token(BAD, text[i:j], start_line, start_col))
                col += j - i
                i = j
                continue
            iri = text[i + 1:j]
            if any(c in iri for c in ' \t"<'):
                err(f"invalid character in IRI <{iri}>", start_line, start_col)
                tokens.append(Token(BAD, iri, start_line, start_col))
            elif not ns.is_absolute_iri(iri):
                err(f"relative IRIs are not allowed: <{iri}>", start_line, start_col)
                tokens.append(Token(BAD, iri, start_line, start_col))
            else:
                tokens.append(Token(IRIREF, iri, start_line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        if ch == '"':
            j = i + 1
            out = []
            closed = False
            while j < n:
                c = text[j]
                if c == '"':
                    closed = True
                    j += 1
                    break
                if c in "\n\r":
                    break
                if c == "\\":
                    if j + 1 < n and text[j + 1] in _ESCAPES:
                        out.append(_ESCAPES[text[j + 1]])
                        j += 2
                        continue
                    err(f"unknown escape sequence at column {start_col + (j - i) + 1}",
                        start_line, start_col + (j - i))
                    j += 2
                    continue
                out.append(c)
                j += 1
            if not closed:
                err("unterminated string literal", start_line, start_col)
                tokens.append(Token(BAD, "".join(out), start_line, start_col))
            else:
                tokens.append(Token(STRING, "".join(out), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "^":
            if text[i:i + 2] == "^^":
                tokens.append(Token(DTSEP, "^^", start_line, start_col))
                i += 2
                col += 2
            else:
                err("stray '^'", start_line, start_col)
                tokens.append(Token(BAD, "^", start_line, start_col))
                i += 1
                col += 1
            continue
        if ch in ";,.":
            tokens.append(Token(PUNCT, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch in "+-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1 if ch in "+-" else i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token(NUMBER, text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "_-"):
                j += 1
            word = text[i:j]
            if j < n and text[j] == ":":
                j += 1
                k = j
                while k < n and text[k] in _LOCAL_CHARS:
                    k += 1
                while k > j and text[k - 1] == ".":
                    k -= 1  # trailing dots terminate the triple, not the name
                local = text[j:k]
                tokens.append(Token(PNAME, text[i:k], start_line, start_col,
                                    prefix=word, local=local))
                col += k - i
                i = k
                continue
            if word == "a":
                tokens.append(Token(WORD_A, "a", start_line, start_col))
            else:
                err(f"unexpected word {word!r}", start_line, start_col)
                tokens.append(Token(BAD, word, start_line, start_col))
            col += j - i
            i = j
            continue
        err(f"unexpected character {ch!r}", start_line, start_col)
        tokens.append(Token(BAD, ch, start_line, start_col))
        i += 1
        col += 1
    tokens.append(Token(EOF, "", line, col))
    return tokens, diagnostics


# --- raw layer ---

@dataclass(frozen=True)
class RawLiteral:
    value: str
    datatype: str


@dataclass(frozen=True)
class RawTriple:
    subject: str
    subject_pos: tuple[int, int]
    predicate: str
    predicate_pos: tuple[int, int]
    object: "str | RawLiteral"
    object_pos: tuple[int, int]


@dataclass(frozen=True)
class RawType:
    subject: str
    subject_pos: tuple[int, int]
    class_iri: str
    class_pos: tuple[int, int]


@dataclass
class RawDocument:
    prefixes: dict[str, str] = field(default_factory=dict)
    triples: list[RawTriple] = field(default_factory=list)
    types: list[RawType] = field(default_factory=list)
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[ParseDiagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.doc = RawDocument(diagnostics=diagnostics)

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != EOF:
            self.pos += 1
        return token

    def error(self, token: Token, message: str) -> None:
        self.doc.diagnostics.append(
            ParseDiagnostic(token.line, token.col, SEVERITY_ERROR, message))

    def warn(self, token: Token, message: str) -> None:
        self.doc.diagnostics.append(
            ParseDiagnostic(token.line, token.col, SEVERITY_WARNING, message))

    def skip_statement(self, just_took: Token | None = None) -> None:
        # already at a boundary when the offending token was the '.'
        if just_took is not None and (
                just_took.kind == EOF
                or (just_took.kind == PUNCT and just_took.text == ".")):
            return
        while True:
            token = self.take()
            if token.kind == EOF or (token.kind == PUNCT and token.text == "."):
                return

    def resolve(self, token: Token) -> str | None:
        if token.kind == IRIREF:
            return token.text
        base = self.doc.prefixes.get(token.prefix, ns.DEFAULT_PREFIXES.get(token.prefix))
        if base is None:
            self.error(token, f"undeclared prefix {token.prefix!r}")
            return None
        return base + token.local

    def run(self) -> RawDocument:
        while True:
            token = self.peek()
            if token.kind == EOF:
                return self.doc
            if token.kind == AT_PREFIX:
                self.prefix_directive()
            elif token.kind in (IRIREF, PNAME):
                self.triple()
            else:
                self.take()
                if token.kind != BAD:
                    self.error(token, f"expected a subject, found {token.text!r}")
                self.skip_statement(token)

    def prefix_directive(self) -> None:
        self.take()
        name_token = self.take()
        if name_token.kind != PNAME or name_token.local:
            self.error(name_token, "expected a prefix name ending in ':'")
            self.skip_statement()
            return
        if not ns.PREFIX_NAME_RE.match(name_token.prefix):
            self.error(name_token, f"invalid prefix name {name_token.prefix!r}")
            self.skip_statement()
            return
        iri_token = self.take()
        if iri_token.kind != IRIREF:
            self.error(iri_token, "expected an IRI reference in '@prefix'")
            self.skip_statement()
            return
        dot = self.take()
        if dot.kind != PUNCT or dot.text != ".":
            self.error(dot, "expected '.' after '@prefix' declaration")
            self.skip_statement()
        if name_token.prefix in self.doc.prefixes:
            self.warn(name_token, f"prefix {name_token.prefix!r} redeclared")
        self.doc.prefixes[name_token.prefix] = iri_token.text

    def triple(self) -> None:
        subject_token = self.take()
        subject = self.resolve(subject_token)
        if subject is None:
            self.skip_statement()
            return
        subject_pos = (subject_token.line, subject_token.col)
        while True:
            pred_token = self.take()
            if pred_token.kind == WORD_A:
                predicate = None
                predicate_pos = (pred_token.line, pred_token.col)
            elif pred_token.kind in (PNAME, IRIREF):
                predicate = self.resolve(pred_token)
                predicate_pos = (pred_token.line, pred_token.col)
                if predicate is None:
                    self.skip_statement()
                    return
            else:
                if pred_token.kind != BAD:
                    self.error(pred_token,
                               f"expected a predicate, found {pred_token.text!r}")
                self.skip_statement(pred_token)
                return
            while True:
                if not self.object_entry(subject, subject_pos, predicate, predicate_pos):
                    return
                sep = self.take()
                if sep.kind == PUNCT and sep.text == ",":
                    continue
                if sep.kind == PUNCT and sep.text == ";":
                    break
                if sep.kind == PUNCT and sep.text == ".":
                    return
                self.error(sep, f"expected ',', ';' or '.', found {sep.text!r}")
                self.skip_statement(sep)
                return

    def object_entry(self, subject, subject_pos, predicate, predicate_pos) -> bool:
        token = self.take()
        object_pos = (token.line, token.col)
        if token.kind in (PNAME, IRIREF):
            obj = self.resolve(token)
            if obj is None:
                self.skip_statement()
                return False
        elif token.kind == NUMBER:
            obj = RawLiteral(token.text, "decimal")
        elif token.kind == STRING:
            obj = self.string_literal(token)
            if obj is None:
                return False
        else:
            if token.kind != BAD:
                self.error(token, f"expected an object, found {token.text!r}")
            self.skip_statement(token)
            return False
        if predicate is None:
            if isinstance(obj, RawLiteral):
                self.error(token, "'a' takes a class reference, not a literal")
                self.skip_statement()
                return False
            self.doc.types.append(RawType(subject, subject_pos, obj, object_pos))
        else:
            self.doc.triples.append(RawTriple(
                subject, subject_pos, predicate, predicate_pos, obj, object_pos))
        return True

    def string_literal(self, token: Token) -> RawLiteral | None:
        if self.peek().kind != DTSEP:
            return RawLiteral(token.text, "string")
        self.take()
        dt_token = self.take()
        if dt_token.kind not in (PNAME, IRIREF):
            self.error(dt_token, "expected a datatype after '^^'")
            self.skip_statement()
            return None
        dt_iri = self.resolve(dt_token)
        if dt_iri is None:
            self.skip_statement()
            return None
        if not dt_iri.startswith(ns.XSD_IRI) or dt_iri[len(ns.XSD_IRI):] not in LITERAL_KINDS:
            self.error(dt_token, f"unsupported datatype <{dt_iri}>")
            self.skip_statement()
            return None
        return RawLiteral(token.text, dt_iri[len(ns.XSD_IRI):])


def parse_raw(text: str) -> RawDocument:
    """Syntax-only parse: prefixes, type assertions, and raw triples."""
    tokens, diagnostics = _tokenize(text)
    return _Parser(tokens, diagnostics).run()


# --- graph building ---

def parse(text: str, registry: Registry) -> tuple[Graph | None, list[ParseDiagnostic]]:
    """Parse a document into a validated graph.

    Returns (graph, diagnostics); the graph is None whenever any diagnostic
    has error severity. Warnings alone do not block.
    """
    raw = parse_raw(text)
    diagnostics = list(raw.diagnostics)
    graph = Graph(registry, prefixes=dict(raw.prefixes))
    class_map = registry.class_iri_map()
    property_map = registry.property_iri_map()

    def fail(pos, message):
        diagnostics.append(ParseDiagnostic(pos[0], pos[1], SEVERITY_ERROR, message))

    for assertion in raw.types:
        class_id = class_map.get(assertion.class_iri)
        if class_id is None:
            fail(assertion.class_pos, f"unknown ontology class <{assertion.class_iri}>")
            continue
        graph.add_entity(assertion.subject, class_id)

    for triple in raw.triples:
        property_id = property_map.get(triple.predicate)
        if property_id is None:
            fail(triple.predicate_pos, f"UnknownProperty: unknown property "
                 f"<{triple.predicate}>")
            continue
        if isinstance(triple.object, RawLiteral):
            try:
                obj = Literal.of(triple.object.datatype, triple.object.value)
            except ValueError as exc:
                fail(triple.object_pos, f"DatatypeViolation: {exc}")
                continue
        else:
            obj = Iri(triple.object)
        try:
            graph.add_statement(Iri(triple.subject), property_id, obj)
        except UnknownSubjectError as exc:
            fail(triple.subject_pos, f"UnknownSubject: {exc}")
        except UnknownObjectError as exc:
            fail(triple.object_pos, f"UnknownObject: {exc}")
        except StatementViolationError as exc:
            pos = (triple.predicate_pos
                   if exc.reason is ViolationReason.DOMAIN_VIOLATION
                   else triple.object_pos)
            fail(pos, f"{exc.reason.value}: {exc}")

    if has_errors(diagnostics):
        return None, diagnostics
    return graph, diagnostics


# --- canonical emission ---

def emit(graph: Graph) -> str:
    """Canonical text for a graph; a byte-level fixed point under parse."""
    rendering = dict(ns.DEFAULT_PREFIXES)
    rendering.update(graph.prefixes)
    # Longest declared IRI wins; name breaks ties. Precomputed and sorted so
    # rendering is deterministic.
    candidates = sorted(rendering.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    used: set[str] = set()

    def render_iri(iri: str) -> str:
        for name, base in candidates:
            if iri.startswith(base):
                local = iri[len(base):]
                if local == "" or (set(local) <= _LOCAL_CHARS and not local.endswith(".")):
                    used.add(name)
                    return f"{name}:{local}"
        return f"<{iri}>"

    def render_literal(literal: Literal) -> str:
        if literal.datatype == "decimal":
            return literal.value
        escaped = "".join(_UNESCAPES.get(c, c) for c in literal.value)
        if literal.datatype == "string":
            return f'"{escaped}"'
        return f'"{escaped}"^^{render_iri(ns.XSD_IRI + literal.datatype)}'

    def object_sort_key(obj):
        if isinstance(obj, Iri):
            return (0, obj.value, "")
        return (1, obj.datatype, obj.value)

    by_subject: dict[str, dict[str, list]] = {}
    for statement in graph.statements:
        groups = by_subject.setdefault(statement.subject.value, {})
        groups.setdefault(statement.property, []).append(statement.object)

    blocks: list[str] = []
    for subject in sorted(graph.nodes):
        lines: list[str] = []
        types = sorted(render_iri(graph.registry.class_iri(t))
                       for t in graph.nodes[subject])
        lines.append(f"{render_iri(subject)} a {', '.join(types)}")
        for property_id in sorted(by_subject.get(subject, {})):
            objects = sorted(by_subject[subject][property_id], key=object_sort_key)
            rendered = ", ".join(
                render_iri(o.value) if isinstance(o, Iri) else render_literal(o)
                for o in objects)
            lines.append(f"    {render_iri(graph.registry.property_iri(property_id))} "
                         f"{rendered}")
        blocks.append(" ;\n".join(lines) + " .\n")

    declared = {name: rendering[name] for name in set(graph.prefixes) | used}
    header = "".join(f"@prefix {name}: <{declared[name]}> .\n" for name in sorted(declared))
    return header + "".join("\n" + block for block in blocks)
