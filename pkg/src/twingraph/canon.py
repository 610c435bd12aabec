"""Canonical renderings: decimals, UTC timestamps, and single-line JSON.

Every byte that reaches a serialized artifact (graph text, payload, event
log) funnels through these helpers so equal values always render equally.
"""

from __future__ import annotations

import json
import re
from datetime import datetime, timedelta, timezone
from decimal import Decimal, InvalidOperation


def canonical_decimal(value: Decimal) -> str:
    """Minimal plain decimal string: no exponent, no trailing zeros, no -0."""
    if not value.is_finite():
        raise ValueError(f"not a finite decimal: {value}")
    if value == 0:
        return "0"
    value = value.normalize()
    sign, digits, exp = value.as_tuple()
    body = "".join(str(d) for d in digits)
    if exp >= 0:
        text = body + "0" * exp
    elif -exp < len(body):
        text = body[:exp] + "." + body[exp:]
    else:
        text = "0." + "0" * (-exp - len(body)) + body
    return ("-" if sign else "") + text


def parse_decimal(text: str) -> Decimal:
    """Parse a plain decimal numeral (optional sign, no exponent)."""
    stripped = text[1:] if text[:1] in "+-" else text
    if not stripped or not stripped.replace(".", "", 1).isdigit():
        raise ValueError(f"not a plain decimal numeral: {text!r}")
    try:
        return Decimal(text)
    except InvalidOperation as exc:
        raise ValueError(f"not a plain decimal numeral: {text!r}") from exc


_FRACTION_RE = re.compile(r"\.([0-9]+)(?=[Z+\-]|$)")


def parse_datetime_utc(text: str) -> datetime:
    """Parse an ISO 8601 UTC dateTime; the zone must be Z or +00:00."""
    candidate = text
    if candidate.endswith("Z"):
        candidate = candidate[:-1] + "+00:00"
    # fromisoformat on 3.10 takes only 3- or 6-digit fractions; canonical
    # output strips trailing zeros, so pad any 1..6 digits back to 6
    match = _FRACTION_RE.search(candidate)
    if match:
        digits = match.group(1)
        if len(digits) > 6:
            raise ValueError(f"dateTime precision below microseconds: {text!r}")
        candidate = candidate[:match.start(1)] + digits.ljust(6, "0") \
            + candidate[match.end(1):]
    elif "." in candidate:
        raise ValueError(f"not an ISO 8601 dateTime: {text!r}")
    try:
        parsed = datetime.fromisoformat(candidate)
    except ValueError as exc:
        raise ValueError(f"not an ISO 8601 dateTime: {text!r}") from exc
    if parsed.tzinfo is None or parsed.utcoffset() != timedelta(0):
        raise ValueError(f"dateTime must be UTC: {text!r}")
    return parsed.astimezone(timezone.utc)


def format_datetime_utc(moment: datetime) -> str:
    """Canonical UTC rendering, seconds precision unless fractions exist."""
    if moment.tzinfo is None or moment.utcoffset() != timedelta(0):
        raise ValueError("datetime must carry a UTC zone")
    base = moment.strftime("%Y-%m-%dT%H:%M:%S")
    if moment.microsecond:
        frac = f"{moment.microsecond:06d}".rstrip("0")
        base += "." + frac
    return base + "Z"


def dumps_canonical(value) -> str:
    """Single-line JSON with sorted keys and no insignificant whitespace.

    Decimal values render as bare number tokens in their minimal form, which
    json.dumps cannot do natively.
    """
    parts: list[str] = []
    _write(value, parts)
    return "".join(parts)


def _write(value, parts: list[str]) -> None:
    if isinstance(value, dict):
        parts.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise TypeError("canonical JSON keys must be strings")
            if i:
                parts.append(",")
            parts.append(json.dumps(key))
            parts.append(":")
            _write(value[key], parts)
        parts.append("}")
    elif isinstance(value, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(value):
            if i:
                parts.append(",")
            _write(item, parts)
        parts.append("]")
    elif isinstance(value, Decimal):
        parts.append(canonical_decimal(value))
    elif isinstance(value, bool) or value is None:
        parts.append(json.dumps(value))
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, str):
        parts.append(json.dumps(value, ensure_ascii=False))
    else:
        raise TypeError(f"no canonical JSON form for {type(value).__name__}")
