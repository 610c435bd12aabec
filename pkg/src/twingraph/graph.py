"""Validated statement store over an ontology registry.

A graph holds typed entity nodes and (subject, property, object) statements.
Every statement is checked eagerly against the registry: both ends must be
known nodes, the property must be registered, and the node types must
satisfy the property's domain and range. A graph built through this API can
therefore never hold an ill-typed statement; validate() re-checks from
scratch for graphs assembled by other means.

Statements carry set semantics (duplicates collapse) but insertion order is
preserved for queries and provenance walks. One writer at a time; readers
may share a quiescent graph freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import namespaces as ns
from .canon import canonical_decimal, format_datetime_utc, parse_datetime_utc, parse_decimal
from .errors import (
    NotAProvenanceNodeError,
    StatementViolationError,
    UnknownClassError,
    UnknownObjectError,
    UnknownPropertyError,
    UnknownSubjectError,
)
from .ontology import LITERAL_KINDS, Registry


@dataclass(frozen=True, order=True)
class Iri:
    """An absolute IRI; equality and order follow the expanded text."""

    value: str

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    """A typed literal in canonical lexical form. Build via Literal.of."""

    datatype: str
    value: str

    @classmethod
    def of(cls, datatype: str, value) -> "Literal":
        return cls(datatype, _canonical_lexical(datatype, value))

    def sort_key(self):
        return (self.datatype, self.value)

    def __str__(self) -> str:
        return f'"{self.value}"^^{self.datatype}'


def _canonical_lexical(datatype: str, value) -> str:
    if datatype == "string":
        if not isinstance(value, str):
            raise ValueError("string literal takes text")
        return value
    if datatype == "decimal":
        from decimal import Decimal
        if isinstance(value, Decimal):
            return canonical_decimal(value)
        return canonical_decimal(parse_decimal(str(value)))
    if datatype == "integer":
        text = str(value).strip()
        stripped = text[1:] if text[:1] in "+-" else text
        if not stripped.isdigit():
            raise ValueError(f"not an integer numeral: {text!r}")
        return str(int(text))
    if datatype == "dateTime":
        if isinstance(value, str):
            return format_datetime_utc(parse_datetime_utc(value))
        return format_datetime_utc(value)
    if datatype == "anyURI":
        text = str(value)
        if not text or any(ch.isspace() for ch in text):
            raise ValueError(f"not a valid anyURI: {text!r}")
        return text
    raise ValueError(f"unknown literal datatype {datatype!r}")


@dataclass(frozen=True)
class Statement:
    subject: Iri
    property: str
    object: "Iri | Literal"

    def key(self):
        obj = self.object
        tail = ("iri", obj.value) if isinstance(obj, Iri) else ("lit", obj.datatype, obj.value)
        return (self.subject.value, self.property, tail)


@dataclass(frozen=True)
class EntityNode:
    iri: Iri
    types: frozenset[str]


class ViolationReason(Enum):
    UNKNOWN_SUBJECT = "UnknownSubject"
    UNKNOWN_OBJECT = "UnknownObject"
    UNKNOWN_PROPERTY = "UnknownProperty"
    DOMAIN_VIOLATION = "DomainViolation"
    RANGE_VIOLATION = "RangeViolation"
    DATATYPE_VIOLATION = "DatatypeViolation"


@dataclass(frozen=True)
class Violation:
    reason: ViolationReason
    message: str
    statement: Statement


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)


# Backward provenance walk, outermost start first. Each step names the
# property to follow and whether the current node sits at the object ("in")
# or subject ("out") end of the matching statement.
_CHAIN_STEPS = (
    (("O13",), "in"),
    (("HP12",), "in"),
    (("L20",), "in"),
    (("L12",), "out"),
    (("HP15", "P55"), "out"),
)


class Graph:
    def __init__(self, registry: Registry, prefixes: dict[str, str] | None = None):
        self.registry = registry
        self.prefixes: dict[str, str] = dict(prefixes or {})
        self.nodes: dict[str, set[str]] = {}
        self.statements: list[Statement] = []
        self._statement_keys: set = set()

    # --- identifiers ---

    def declare_prefix(self, name: str, iri: str) -> None:
        if not ns.PREFIX_NAME_RE.match(name):
            raise ValueError(f"invalid prefix name {name!r}")
        self.prefixes[name] = iri

    def resolve(self, text) -> Iri:
        if isinstance(text, Iri):
            return text
        return Iri(ns.resolve_iri(text, self.prefixes))

    # --- construction ---

    def add_entity(self, iri, class_ids) -> Iri:
        """Create or extend a node; type sets merge across calls."""
        node = self.resolve(iri)
        types = [class_ids] if isinstance(class_ids, str) else list(class_ids)
        if not types:
            raise UnknownClassError("a node needs at least one class")
        for cid in types:
            if cid not in self.registry.classes:
                raise UnknownClassError(f"unknown class {cid}")
        self.nodes.setdefault(node.value, set()).update(types)
        return node

    def add_statement(self, subject, property_id: str, obj) -> Statement:
        """Validate and insert one statement; duplicates collapse silently."""
        subject = self.resolve(subject)
        if isinstance(obj, (str, Iri)) and not isinstance(obj, Literal):
            obj = self.resolve(obj)
        statement = Statement(subject, property_id, obj)
        self._check_statement(statement)
        if statement.key() not in self._statement_keys:
            self._statement_keys.add(statement.key())
            self.statements.append(statement)
        return statement

    def has_statement(self, subject, property_id: str, obj) -> bool:
        subject = self.resolve(subject)
        if isinstance(obj, (str, Iri)) and not isinstance(obj, Literal):
            obj = self.resolve(obj)
        return Statement(subject, property_id, obj).key() in self._statement_keys

    def _check_statement(self, statement: Statement) -> None:
        pdef = self.registry.properties.get(statement.property)
        if pdef is None:
            raise UnknownPropertyError(f"unknown property {statement.property}")
        subject_types = self.nodes.get(statement.subject.value)
        if not subject_types:
            raise UnknownSubjectError(f"unknown subject {statement.subject}")
        obj = statement.object
        if isinstance(obj, Iri):
            object_types = self.nodes.get(obj.value)
            if not object_types:
                raise UnknownObjectError(f"unknown object {obj}")
            if pdef.range in LITERAL_KINDS:
                raise StatementViolationError(
                    ViolationReason.RANGE_VIOLATION,
                    f"{statement.property} expects a {pdef.range} literal, got an IRI",
                    frozenset(subject_types), frozenset(object_types))
            if not any(self.registry.is_subclass_of(t, pdef.domain) for t in subject_types):
                raise StatementViolationError(
                    ViolationReason.DOMAIN_VIOLATION,
                    f"subject of {statement.property} must fall under {pdef.domain}; "
                    f"found {sorted(subject_types)}",
                    frozenset(subject_types), frozenset(object_types))
            if not any(self.registry.is_subclass_of(t, pdef.range) for t in object_types):
                raise StatementViolationError(
                    ViolationReason.RANGE_VIOLATION,
                    f"object of {statement.property} must fall under {pdef.range}; "
                    f"found {sorted(object_types)}",
                    frozenset(subject_types), frozenset(object_types))
        else:
            if not any(self.registry.is_subclass_of(t, pdef.domain) for t in subject_types):
                raise StatementViolationError(
                    ViolationReason.DOMAIN_VIOLATION,
                    f"subject of {statement.property} must fall under {pdef.domain}; "
                    f"found {sorted(subject_types)}",
                    frozenset(subject_types))
            if pdef.range not in LITERAL_KINDS:
                raise StatementViolationError(
                    ViolationReason.RANGE_VIOLATION,
                    f"{statement.property} expects a {pdef.range}, got a literal",
                    frozenset(subject_types))
            if obj.datatype != pdef.range:
                raise StatementViolationError(
                    ViolationReason.DATATYPE_VIOLATION,
                    f"{statement.property} expects a {pdef.range} literal, "
                    f"got {obj.datatype}",
                    frozenset(subject_types))

    # --- validation ---

    def validate(self) -> ValidationReport:
        """Re-check every statement; never raises."""
        violations: list[Violation] = []

        def flag(reason, message, statement):
            violations.append(Violation(reason, message, statement))

        for statement in self.statements:
            pdef = self.registry.properties.get(statement.property)
            if pdef is None:
                flag(ViolationReason.UNKNOWN_PROPERTY,
                     f"unknown property {statement.property}", statement)
                continue
            subject_types = self.nodes.get(statement.subject.value)
            if not subject_types:
                flag(ViolationReason.UNKNOWN_SUBJECT,
                     f"unknown subject {statement.subject}", statement)
                continue
            obj = statement.object
            if isinstance(obj, Iri):
                object_types = self.nodes.get(obj.value)
                if not object_types:
                    flag(ViolationReason.UNKNOWN_OBJECT, f"unknown object {obj}", statement)
                    continue
            else:
                try:
                    _canonical_lexical(obj.datatype, obj.value)
                except ValueError as exc:
                    flag(ViolationReason.DATATYPE_VIOLATION, str(exc), statement)
                    continue
            try:
                self._check_statement(statement)
            except StatementViolationError as exc:
                flag(exc.reason, str(exc), statement)
            except UnknownClassError as exc:
                flag(ViolationReason.UNKNOWN_SUBJECT, str(exc), statement)
        return ValidationReport(ok=not violations, violations=violations)

    # --- queries ---

    def node(self, iri) -> EntityNode:
        resolved = self.resolve(iri)
        types = self.nodes.get(resolved.value)
        if not types:
            raise UnknownSubjectError(f"unknown node {resolved}")
        return EntityNode(resolved, frozenset(types))

    def instances_of(self, class_id: str, transitive: bool = False) -> list[Iri]:
        """Nodes typed with class_id, optionally via any subclass; IRI order."""
        if class_id not in self.registry.classes:
            raise UnknownClassError(f"unknown class {class_id}")
        accepted = self.registry.subclass_closure(class_id) if transitive else {class_id}
        found = [iri for iri, types in self.nodes.items() if types & accepted]
        return [Iri(v) for v in sorted(found)]

    def objects_of(self, subject, property_id: str) -> list:
        """Objects of (subject, property) statements in insertion order."""
        resolved = self.resolve(subject)
        if property_id not in self.registry.properties:
            raise UnknownPropertyError(f"unknown property {property_id}")
        return [s.object for s in self.statements
                if s.subject == resolved and s.property == property_id]

    # --- provenance ---

    def provenance_chain(self, start) -> list[Statement]:
        """Walk an activation, signal, or measurement back toward its asset.

        Follows O13, HP12, L20 upstream and L12 plus the sensor attachment
        downstream, stopping quietly at the first missing link. When several
        statements match a step, the earliest inserted one wins.
        """
        resolved = self.resolve(start)
        types = self.nodes.get(resolved.value)
        if not types:
            raise UnknownSubjectError(f"unknown node {resolved}")
        skip = None
        for offset, class_id in ((0, "HC14"), (2, "HC12"), (3, "HC13")):
            if any(self.registry.is_subclass_of(t, class_id) for t in types):
                skip = offset
                break
        if skip is None:
            raise NotAProvenanceNodeError(
                f"{resolved} is not an activation event, signal, or measurement")
        path: list[Statement] = []
        current = resolved
        for properties, direction in _CHAIN_STEPS[skip:]:
            hit = None
            for statement in self.statements:
                if statement.property not in properties:
                    continue
                if direction == "in" and statement.object == current:
                    hit = statement
                    current = statement.subject
                    break
                if direction == "out" and statement.subject == current:
                    hit = statement
                    current = statement.object
                    break
            if hit is None:
                break
            path.append(hit)
        return path

    # --- equality for tests and tools ---

    def content_equal(self, other: "Graph") -> bool:
        return (self.nodes == other.nodes
                and self._statement_keys == other._statement_keys)
