"""Threshold rule DSL for deciders.

    RULE r1 WHEN TYPE = "humidity" AND VALUE > 70 THEN ALERT wd:OPD VIA "email"
    RULE r2 WHEN TYPE = "vibration" AND VALUE >= 0.5 FOR 3 SAMPLES
        MODE EVERY THEN ACTIVATE ex:siren

A rule matches signals of one measured type. Its condition holds when the
comparator is true for each of the last `sustain` signals (default 1). The
trigger mode decides when a holding condition fires: ON_RISE (default) only
on the transition from not-holding to holding, EVERY whenever it holds.
Comparisons are exact decimal arithmetic; no binary floating point.

Action targets are kept as written (CURIE or <IRI>) and resolved against a
prefix map by whoever executes the rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from enum import Enum

from .canon import parse_decimal
from .errors import ParseDiagnostic, SEVERITY_ERROR, has_errors

COMPARATORS = ("<", "<=", ">", ">=", "=", "!=")

_KEYWORDS = {"RULE", "WHEN", "TYPE", "AND", "VALUE", "FOR", "SAMPLES",
             "MODE", "ON_RISE", "EVERY", "THEN", "ACTIVATE", "ALERT", "VIA"}


class TriggerMode(Enum):
    ON_RISE = "ON_RISE"
    EVERY = "EVERY"


class ActionKind(Enum):
    ACTIVATE = "ACTIVATE"
    ALERT = "ALERT"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    target: str  # CURIE or <IRI> text, resolved at execution time
    channel: str | None = None  # ALERT only


@dataclass(frozen=True)
class Rule:
    id: str
    measured_type: str
    comparator: str
    threshold: Decimal
    sustain: int = 1
    mode: TriggerMode = TriggerMode.ON_RISE
    actions: tuple[Action, ...] = ()


@dataclass(frozen=True)
class Decision:
    fired: bool
    rule_id: str
    actions: tuple[Action, ...] = ()


# --- evaluation ---

def compare(value: Decimal, comparator: str, threshold: Decimal) -> bool:
    if comparator == "<":
        return value < threshold
    if comparator == "<=":
        return value <= threshold
    if comparator == ">":
        return value > threshold
    if comparator == ">=":
        return value >= threshold
    if comparator == "=":
        return value == threshold
    if comparator == "!=":
        return value != threshold
    raise ValueError(f"unknown comparator {comparator!r}")


def evaluate_rule(rule: Rule, window: "list[Decimal]") -> Decision:
    """Evaluate a rule against a value window, newest last.

    The window must hold only values of the rule's measured type and should
    be the full history seen so far (at minimum the last sustain+1 entries);
    ON_RISE needs one entry of lookback. An empty window never fires.
    """
    n = len(window)
    if n == 0:
        return Decision(False, rule.id, ())

    def holds(end: int) -> bool:
        if end + 1 < rule.sustain:
            return False
        return all(compare(window[i], rule.comparator, rule.threshold)
                   for i in range(end - rule.sustain + 1, end + 1))

    now = holds(n - 1)
    if rule.mode is TriggerMode.EVERY:
        fired = now
    else:
        fired = now and not (n >= 2 and holds(n - 2))
    return Decision(fired, rule.id, rule.actions if fired else ())


# --- parsing ---

WORD = "word"
STRING = "string"
NUMBER = "number"
CMP = "cmp"
COMMA = "comma"
TARGET = "target"
EOF = "eof"

_TARGET_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.%~/-")


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> tuple[list[_Token], list[ParseDiagnostic]]:
    tokens: list[_Token] = []
    diagnostics: list[ParseDiagnostic] = []
    line, col = 1, 1
    i, n = 0, len(text)
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
        if ch == ",":
            tokens.append(_Token(COMMA, ",", start_line, start_col))
            i += 1
            col += 1
            continue
        if ch in "<>=!":
            two = text[i:i + 2]
            if two in ("<=", ">=", "!="):
                tokens.append(_Token(CMP, two, start_line, start_col))
                i += 2
                col += 2
                continue
            if ch == "<":
                j = i + 1
                while j < n and text[j] not in ">\n" and not text[j].isspace():
                    j += 1
                if j < n and text[j] == ">" and j > i + 1:
                    tokens.append(_Token(TARGET, text[i:j + 1], start_line, start_col))
                    col += j - i + 1
                    i = j + 1
                    continue
                # no closing '>' in reach: plain less-than comparator
            if ch in "<>=":
                tokens.append(_Token(CMP, ch, start_line, start_col))
                i += 1
                col += 1
                continue
            diagnostics.append(ParseDiagnostic(
                start_line, start_col, SEVERITY_ERROR, "stray '!'"))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] == "\n":
                diagnostics.append(ParseDiagnostic(
                    start_line, start_col, SEVERITY_ERROR, "unterminated string"))
                i = j
                continue
            tokens.append(_Token(STRING, text[i + 1:j], start_line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        if ch.isdigit() or (ch in "+-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            tokens.append(_Token(NUMBER, text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and text[j] in _TARGET_CHARS:
                j += 1
            if j < n and text[j] == ":":
                k = j + 1
                while k < n and text[k] in _TARGET_CHARS:
                    k += 1
                tokens.append(_Token(TARGET, text[i:k], start_line, start_col))
                col += k - i
                i = k
                continue
            tokens.append(_Token(WORD, text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        diagnostics.append(ParseDiagnostic(
            start_line, start_col, SEVERITY_ERROR, f"unexpected character {ch!r}"))
        i += 1
        col += 1
    tokens.append(_Token(EOF, "", line, col))
    return tokens, diagnostics


class _RuleParser:
    def __init__(self, tokens: list[_Token], diagnostics: list[ParseDiagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        token = self.tokens[self.pos]
        if token.kind != EOF:
            self.pos += 1
        return token

    def error(self, token: _Token, message: str) -> None:
        self.diagnostics.append(
            ParseDiagnostic(token.line, token.col, SEVERITY_ERROR, message))

    def expect_word(self, keyword: str) -> bool:
        token = self.take()
        if token.kind == WORD and token.text == keyword:
            return True
        self.error(token, f"expected {keyword}, found {token.text or 'end of input'!r}")
        return False

    def sync_to_rule(self) -> None:
        while True:
            token = self.peek()
            if token.kind == EOF or (token.kind == WORD and token.text == "RULE"):
                return
            self.take()

    def run(self) -> list[Rule]:
        rules: list[Rule] = []
        seen: dict[str, _Token] = {}
        while self.peek().kind != EOF:
            rule = self.rule(seen)
            if rule is not None:
                rules.append(rule)
            else:
                self.sync_to_rule()
        return rules

    def rule(self, seen: dict[str, _Token]) -> Rule | None:
        if not self.expect_word("RULE"):
            return None
        id_token = self.take()
        if id_token.kind != WORD or id_token.text in _KEYWORDS:
            self.error(id_token, "expected a rule id after RULE")
            return None
        if id_token.text in seen:
            self.error(id_token, f"duplicate rule id {id_token.text!r}")
            return None
        if not self.expect_word("WHEN") or not self.expect_word("TYPE"):
            return None
        eq = self.take()
        if eq.kind != CMP or eq.text != "=":
            self.error(eq, "expected '=' after TYPE")
            return None
        type_token = self.take()
        if type_token.kind != STRING:
            self.error(type_token, "expected a quoted measured type")
            return None
        if not self.expect_word("AND") or not self.expect_word("VALUE"):
            return None
        cmp_token = self.take()
        if cmp_token.kind != CMP:
            self.error(cmp_token, "expected a comparator after VALUE")
            return None
        number_token = self.take()
        if number_token.kind != NUMBER:
            self.error(number_token, "expected a number threshold")
            return None
        try:
            threshold = parse_decimal(number_token.text)
        except ValueError as exc:
            self.error(number_token, str(exc))
            return None

        sustain = 1
        mode = TriggerMode.ON_RISE
        token = self.peek()
        if token.kind == WORD and token.text == "FOR":
            self.take()
            count_token = self.take()
            if count_token.kind != NUMBER or not count_token.text.isdigit() \
                    or int(count_token.text) < 1:
                self.error(count_token, "FOR takes a positive integer sample count")
                return None
            sustain = int(count_token.text)
            if not self.expect_word("SAMPLES"):
                return None
            token = self.peek()
        if token.kind == WORD and token.text == "MODE":
            self.take()
            mode_token = self.take()
            if mode_token.kind != WORD or mode_token.text not in ("ON_RISE", "EVERY"):
                self.error(mode_token, "MODE takes ON_RISE or EVERY")
                return None
            mode = TriggerMode(mode_token.text)
        if not self.expect_word("THEN"):
            return None

        actions: list[Action] = []
        while True:
            action = self.action()
            if action is None:
                return None
            actions.append(action)
            if self.peek().kind == COMMA:
                self.take()
                continue
            break

        seen[id_token.text] = id_token
        return Rule(id_token.text, type_token.text, cmp_token.text, threshold,
                    sustain, mode, tuple(actions))

    def action(self) -> Action | None:
        verb = self.take()
        if verb.kind != WORD or verb.text not in ("ACTIVATE", "ALERT"):
            self.error(verb, "expected ACTIVATE or ALERT")
            return None
        target = self.take()
        if target.kind != TARGET:
            self.error(target, f"{verb.text} takes an IRI target")
            return None
        if verb.text == "ACTIVATE":
            return Action(ActionKind.ACTIVATE, target.text)
        if not self.expect_word("VIA"):
            return None
        channel = self.take()
        if channel.kind != STRING:
            self.error(channel, "VIA takes a quoted channel")
            return None
        return Action(ActionKind.ALERT, target.text, channel.text)


def parse_rules(text: str) -> tuple[list[Rule] | None, list[ParseDiagnostic]]:
    """Parse a rule block. Returns (rules, diagnostics); rules is None on error."""
    tokens, diagnostics = _tokenize(text)
    parser = _RuleParser(tokens, diagnostics)
    rules = parser.run()
    if has_errors(diagnostics):
        return None, diagnostics
    return rules, diagnostics
