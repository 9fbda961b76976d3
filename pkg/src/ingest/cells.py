"""
Cell model and value inference.
"""

import re
from dataclasses import dataclass
from datetime import date
from typing import Any, NamedTuple

from constraints.model import DeclaredType, NullPolicy

INTEGER_RE = re.compile(r"[+-]?\d+")
FLOAT_RE = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}")

ID_LIST_SEPARATOR = ";"


class InferredType(NamedTuple):
    """Result of classifying a raw value."""

    inferred_type: str  # integer, float, boolean, date or text
    leading_zero_numeric: bool


@dataclass(frozen=True)
class Cell:
    """One CSV field: raw text plus its typed reading.

    Exactly one of is_null, parsed (not None) and parse_failed holds.
    """

    raw: str
    is_null: bool = False
    parsed: Any = None
    parse_failed: bool = False
    inferred_type: str | None = None
    leading_zero_numeric: bool = False


def _parse_date(raw: str) -> date | None:
    if DATE_RE.fullmatch(raw) is None:
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError:
        return None


def infer_cell_type(raw: str) -> InferredType:
    """Classify a non-null raw value: integer, float, boolean, date, then text."""
    if INTEGER_RE.fullmatch(raw):
        return InferredType("integer", raw.startswith("0") and len(raw) > 1)
    if FLOAT_RE.fullmatch(raw):
        return InferredType("float", False)
    if raw.lower() in ("true", "false"):
        return InferredType("boolean", False)
    if _parse_date(raw) is not None:
        return InferredType("date", False)
    return InferredType("text", False)


def parse_value(raw: str, declared: DeclaredType | str) -> Any:
    """Parse raw text as the declared type. Returns None on failure."""
    declared = DeclaredType(declared)
    if declared is DeclaredType.INTEGER:
        if INTEGER_RE.fullmatch(raw) is None:
            return None
        try:
            return int(raw)
        except (ValueError, OverflowError):
            # beyond the interpreter's digit limit
            return None
    if declared is DeclaredType.FLOAT:
        return float(raw) if FLOAT_RE.fullmatch(raw) else None
    if declared is DeclaredType.BOOLEAN:
        lowered = raw.lower()
        return lowered == "true" if lowered in ("true", "false") else None
    if declared is DeclaredType.DATE:
        return _parse_date(raw)
    if declared is DeclaredType.ID_LIST:
        elements = tuple(raw.split(ID_LIST_SEPARATOR))
        return None if any(e == "" for e in elements) else elements
    return raw


def make_cell(raw: str, null_policy: NullPolicy, declared: DeclaredType | None = None) -> Cell:
    """Build a cell. Without a declared type the inferred type decides the parse."""
    if null_policy.is_null(raw):
        return Cell(raw=raw, is_null=True)
    inferred = infer_cell_type(raw)
    if declared is None:
        declared = _INFERRED_AS[inferred.inferred_type]
    parsed = parse_value(raw, declared)
    return Cell(
        raw=raw,
        parsed=parsed,
        parse_failed=parsed is None,
        inferred_type=inferred.inferred_type,
        leading_zero_numeric=inferred.leading_zero_numeric,
    )


_INFERRED_AS = {
    "integer": DeclaredType.INTEGER,
    "float": DeclaredType.FLOAT,
    "boolean": DeclaredType.BOOLEAN,
    "date": DeclaredType.DATE,
    "text": DeclaredType.TEXT,
}
