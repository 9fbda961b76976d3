"""
Data-smell detectors: believability, consistency, syntactic and encoding.

Smells are legal values that look suspicious. Cells that already produce an
integrity issue (absent required value, invalid value) are left out of the
evidence so the same cell is never reported twice.
"""

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from constraints.model import ColumnConstraint, ConstraintSchema, NullPolicy, TableConstraint
from core.settings import SmellParams
from core.taxonomy import Attribute
from detect.integrity import check_cell, key_groups
from ingest.cells import Cell
from ingest.tables import Dataset, Table

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmellFinding:
    """One data smell. Smells carry no outcome label."""

    table: str
    column: str
    kind: Attribute
    rows: tuple[int, ...]
    evidence: str
    score: float

    def sort_key(self) -> tuple:
        return (self.table, self.column, self.kind.value, self.rows[0], self.evidence)


def sort_smells(findings: list[SmellFinding]) -> list[SmellFinding]:
    return sorted(findings, key=SmellFinding.sort_key)


def _reported(cell: Cell, constraint: ColumnConstraint | None) -> bool:
    """Whether an integrity detector already reports this cell."""
    if constraint is None:
        return False
    if cell.is_null:
        return constraint.required
    return check_cell(cell, constraint) is not None


def _column_constraint(schema: TableConstraint | None, column: str) -> ColumnConstraint | None:
    if schema is None or column not in schema.column_names:
        return None
    return schema.column(column)


def _fmt(value: float) -> str:
    return f"{value:.6g}"


# ---------------------------------------------------------------------------
# Believability
# ---------------------------------------------------------------------------


def outlier_fences(values: np.ndarray, iqr_k: float) -> tuple[float, float, float]:
    """Lower fence, upper fence and IQR (linear-interpolated quartiles)."""
    q1, q3 = np.percentile(values, [25, 75])
    iqr = float(q3 - q1)
    return float(q1 - iqr_k * iqr), float(q3 + iqr_k * iqr), iqr


def _outlier_findings(
    table: Table, column: str, rows: list[int], values: np.ndarray, params: SmellParams
) -> list[SmellFinding]:
    low, high, iqr = outlier_fences(values, params.iqr_k)
    mean = float(values.mean())
    std = float(values.std())
    findings = []
    for row, value in zip(rows, values, strict=True):
        reasons = []
        exceedance = 0.0
        if iqr > 0 and (value < low or value > high):
            beyond = low - value if value < low else value - high
            exceedance = max(exceedance, beyond / iqr)
            reasons.append(f"outside IQR fences [{_fmt(low)}, {_fmt(high)}]")
        if std > 0:
            z = abs(value - mean) / std
            if z > params.z_max:
                exceedance = max(exceedance, (z - params.z_max) / max(params.z_max, 1.0))
                reasons.append(f"|z|={_fmt(z)} > {_fmt(params.z_max)}")
        if not reasons:
            continue
        findings.append(
            SmellFinding(
                table=table.name,
                column=column,
                kind=Attribute.BELIEVABILITY,
                rows=(row,),
                evidence=f"{column}={table.cell(row, column).raw} is {' and '.join(reasons)}",
                score=min(1.0, exceedance),
            )
        )
    return findings


def _frequency_findings(
    table: Table, column: str, rows: list[int], values: np.ndarray, params: SmellParams
) -> list[SmellFinding]:
    distinct, counts = np.unique(values, return_counts=True)
    findings = []
    for value, count in zip(distinct, counts, strict=True):
        share = count / len(values)
        if share < params.freq_threshold:
            continue
        members = tuple(row for row, v in zip(rows, values, strict=True) if v == value)
        findings.append(
            SmellFinding(
                table=table.name,
                column=column,
                kind=Attribute.BELIEVABILITY,
                rows=members,
                evidence=f"{column} value {_fmt(value)} holds {share:.1%} of {len(values)} values",
                score=float(share),
            )
        )
    return findings


def _as_float(parsed) -> float | None:
    """Finite float of a parsed number; None for integers or literals beyond float range."""
    try:
        value = float(parsed)
    except OverflowError:
        return None
    return value if math.isfinite(value) else None


def detect_believability(
    table: Table, schema: TableConstraint, params: SmellParams | None = None
) -> list[SmellFinding]:
    """Outlying cells (IQR fences or z-score) and over-concentrated values in numeric columns."""
    params = params or SmellParams()
    findings: list[SmellFinding] = []
    for constraint in schema.columns:
        if not constraint.declared_type.is_numeric:
            continue
        rows, values = [], []
        for row, cell in table.column_cells(constraint.name):
            if cell.is_null or _reported(cell, constraint):
                continue
            value = _as_float(cell.parsed)
            if value is None:
                continue
            rows.append(row)
            values.append(value)
        if len(values) < params.min_n:
            logger.debug("%s.%s: %d values, below min_n", table.name, constraint.name, len(values))
            continue
        array = np.asarray(values, dtype=float)
        findings += _outlier_findings(table, constraint.name, rows, array, params)
        findings += _frequency_findings(table, constraint.name, rows, array, params)
    return sort_smells(findings)


# ---------------------------------------------------------------------------
# Consistency
# ---------------------------------------------------------------------------


def canonical_form(raw: str) -> str:
    """Trim, squeeze internal whitespace and case-fold."""
    return " ".join(raw.split()).casefold()


def _variant_finding(table: Table, column: str, members: list[tuple[int, str]], what: str):
    counts = Counter(raw for _, raw in members)
    variants = sorted(counts)
    return SmellFinding(
        table=table.name,
        column=column,
        kind=Attribute.CONSISTENCY,
        rows=tuple(row for row, _ in members),
        evidence=f"{column} {what} written as {variants}",
        score=1.0 - max(counts.values()) / len(members),
    )


def detect_consistency(
    table: Table, null_policy: NullPolicy | None = None, schema: TableConstraint | None = None
) -> list[SmellFinding]:
    """Several null tokens in one column, or values differing only in case/whitespace."""
    null_policy = null_policy or NullPolicy()
    findings = []
    for column in table.header:
        constraint = _column_constraint(schema, column)
        absent: list[tuple[int, str]] = []
        forms: dict[str, list[tuple[int, str]]] = defaultdict(list)
        for row, cell in table.column_cells(column):
            if _reported(cell, constraint):
                continue
            if null_policy.is_null(cell.raw):
                absent.append((row, cell.raw))
            else:
                forms[canonical_form(cell.raw)].append((row, cell.raw))
        if len({raw for _, raw in absent}) >= 2:
            findings.append(_variant_finding(table, column, absent, "absence is"))
        for canonical, members in forms.items():
            if len({raw for _, raw in members}) >= 2:
                findings.append(_variant_finding(table, column, members, f"{canonical!r} is"))
    return sort_smells(findings)


# ---------------------------------------------------------------------------
# Syntactic
# ---------------------------------------------------------------------------


def detect_syntactic(table: Table, schema: TableConstraint) -> list[SmellFinding]:
    """One label naming entities with different keys, in label_like columns."""
    if not schema.key:
        return []
    key_of: dict[int, tuple[str, ...]] = {}
    for key_values, members in key_groups(table, schema.key).items():
        for row in members:
            key_of[row] = key_values

    findings = []
    for constraint in schema.columns:
        if not constraint.label_like:
            continue
        by_value: dict[str, list[int]] = defaultdict(list)
        for row, cell in table.column_cells(constraint.name):
            if cell.is_null or _reported(cell, constraint) or row not in key_of:
                continue
            by_value[cell.raw].append(row)
        for value, rows in by_value.items():
            keys = {key_of[row] for row in rows}
            if len(keys) < 2:
                continue
            findings.append(
                SmellFinding(
                    table=table.name,
                    column=constraint.name,
                    kind=Attribute.SYNTACTIC,
                    rows=tuple(rows),
                    evidence=f"{constraint.name}={value!r} names {len(keys)} entities "
                    f"with different keys",
                    score=1.0 - 1.0 / len(keys),
                )
            )
    return sort_smells(findings)


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------


def detect_encoding(
    table: Table, schema: TableConstraint | None = None, params: SmellParams | None = None
) -> list[SmellFinding]:
    """Minority-typed cells in a type-dominated column, and leading-zero numbers."""
    params = params or SmellParams()
    findings = []
    for column in table.header:
        constraint = _column_constraint(schema, column)
        cells = [
            (row, cell)
            for row, cell in table.column_cells(column)
            if not cell.is_null and not _reported(cell, constraint)
        ]
        if not cells:
            continue
        histogram = Counter(cell.inferred_type for _, cell in cells)
        majority, count = histogram.most_common(1)[0]
        share = count / len(cells)
        dominant = count * 2 > len(cells) and share >= params.type_majority
        for row, cell in cells:
            if cell.leading_zero_numeric and majority in ("integer", "float"):
                evidence = f"{column}={cell.raw!r} has a leading zero that numeric coercion drops"
                score = 1.0
            elif dominant and cell.inferred_type != majority:
                evidence = (
                    f"{column}={cell.raw!r} reads as {cell.inferred_type} "
                    f"in a {share:.0%} {majority} column"
                )
                score = share
            else:
                continue
            findings.append(
                SmellFinding(
                    table=table.name,
                    column=column,
                    kind=Attribute.ENCODING,
                    rows=(row,),
                    evidence=evidence,
                    score=score,
                )
            )
    return sort_smells(findings)


def detect_smells(
    dataset: Dataset, schema: ConstraintSchema, params: SmellParams | None = None
) -> list[SmellFinding]:
    """Run the four smell detectors over every schema table."""
    params = params or SmellParams()
    findings: list[SmellFinding] = []
    for name, table_schema in schema.tables.items():
        table = dataset.table(name)
        findings += detect_believability(table, table_schema, params)
        findings += detect_consistency(table, schema.null_policy, table_schema)
        findings += detect_syntactic(table, table_schema)
        findings += detect_encoding(table, table_schema, params)
        logger.debug("Scanned %s for smells", name)
    logger.info("Detected %d smell(s)", len(findings))
    return sort_smells(findings)
