"""Model response protocol: extraction, schema checks, rendering.

Extraction is deliberately tolerant (models wrap JSON in prose, code
fences, or reasoning), validation is deliberately strict. Every failure
is one of the typed parse or allocation errors; no raw exception from
malformed text ever escapes this module.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping

from ..accounting import RENORMALIZE_BAND, validate_allocation
from ..domain import AllocationVector, MarketSpec
from ..errors import NoObjectFound, SchemaMismatch

__all__ = [
    "extract_json_object",
    "parse_allocation_response",
    "render_allocation_response",
]

# Give up after this many candidate JSON spans; guards pathological
# brace-heavy inputs without ever raising.
_MAX_CANDIDATES = 200


def _balanced_spans(text: str) -> list[tuple[int, int]]:
    """Balanced {...} spans in one pass, outermost spans last-closed."""
    spans: list[tuple[int, int]] = []
    stack: list[int] = []
    in_string = False
    escaped = False
    for i, ch in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            # String state only trustworthy inside a span; harmless outside.
            in_string = True
        elif ch == "{":
            stack.append(i)
        elif ch == "}" and stack:
            start = stack.pop()
            spans.append((start, i + 1))
            if len(spans) >= _MAX_CANDIDATES:
                break
    return spans


def extract_json_object(text: str) -> dict[str, Any]:
    """Find the JSON object embedded in free-form response text.

    Tries the whole text first, then every balanced brace span, widest
    first, preferring spans that mention "allocations". Raises
    ``NoObjectFound`` when nothing parses to a dict.
    """
    if not isinstance(text, str) or "{" not in text:
        raise NoObjectFound("response contains no JSON object")
    try:
        whole = json.loads(text)
        if isinstance(whole, dict):
            return whole
    except (json.JSONDecodeError, RecursionError):
        pass
    spans = _balanced_spans(text)
    spans.sort(key=lambda s: (-(s[1] - s[0]), s[0]))
    spans = spans[:_MAX_CANDIDATES]
    fallback: dict[str, Any] | None = None
    for start, end in spans:
        try:
            candidate = json.loads(text[start:end])
        except (json.JSONDecodeError, RecursionError):
            continue
        if not isinstance(candidate, dict):
            continue
        if "allocations" in candidate:
            return candidate
        if fallback is None:
            fallback = candidate
    if fallback is not None:
        return fallback
    raise NoObjectFound("no balanced span parses as a JSON object")


def _schema_check(obj: Mapping[str, Any]) -> tuple[str, dict[str, float]]:
    if "reasoning" not in obj:
        raise SchemaMismatch('missing "reasoning" field')
    if "allocations" not in obj:
        raise SchemaMismatch('missing "allocations" field')
    reasoning = obj["reasoning"]
    if not isinstance(reasoning, str):
        raise SchemaMismatch('"reasoning" must be a string')
    allocations = obj["allocations"]
    if not isinstance(allocations, dict):
        raise SchemaMismatch('"allocations" must be an object')
    weights: dict[str, float] = {}
    for asset, value in allocations.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaMismatch(f"weight for {asset!r} is not a number")
        value = float(value)
        if not math.isfinite(value):
            raise SchemaMismatch(f"weight for {asset!r} is not finite")
        weights[str(asset)] = value
    return reasoning, weights


def parse_allocation_response(
    raw: str,
    spec: MarketSpec,
    band: float = RENORMALIZE_BAND,
) -> tuple[str, AllocationVector]:
    """Raw response text to (reasoning, validated allocation)."""
    obj = extract_json_object(raw)
    reasoning, weights = _schema_check(obj)
    return reasoning, validate_allocation(weights, spec, band=band)


def render_allocation_response(reasoning: str, allocation: AllocationVector) -> str:
    """Canonical wire form of a decision.

    Weights keep full float precision, so rendering then parsing gives
    back the identical allocation.
    """
    return json.dumps(
        {"reasoning": reasoning, "allocations": dict(allocation.weights)},
        ensure_ascii=False,
    )
