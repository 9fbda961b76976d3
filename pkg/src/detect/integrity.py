"""
Integrity-issue detectors: missing, invalid, duplicate and conflict.

Every detector is a pure function over the loaded dataset. A cell that is
absent or invalid binds as unknown in rule evaluation, so one root cause is
reported once.
"""

import logging
from collections import defaultdict
from collections.abc import Mapping, Sequence
from typing import Any

from constraints.model import (
    ColumnConstraint,
    ConstraintSchema,
    CrossTableRule,
    TableConstraint,
)
from core.errors import DataLoadError
from core.taxonomy import Attribute, Scope
from detect.issues import (
    BASELINE,
    DUPLICATE_KEY,
    EXPECTED_KEYS,
    KEY_CONFLICT,
    PATTERN,
    RANGE,
    REQUIRED,
    TYPE,
    Issue,
    make_issue,
    sort_issues,
)
from ingest.cells import Cell
from ingest.tables import Dataset, Table, load_expected_keys
from syntax.evaluator import Verdict, eval_rule
from syntax.nodes import aggregates, referenced_columns

logger = logging.getLogger(__name__)

ExpectedKeys = Mapping[str, Sequence[tuple[str, ...]]]


# ---------------------------------------------------------------------------
# Cell level
# ---------------------------------------------------------------------------


def check_cell(cell: Cell, constraint: ColumnConstraint) -> str | None:
    """Return the first violated kind (pattern, type, range) of a non-null cell, or None."""
    if cell.is_null:
        return None
    if not constraint.matches_pattern(cell.raw):
        return PATTERN
    if cell.parse_failed:
        return TYPE
    if not constraint.in_domain(cell.parsed):
        return RANGE
    return None


def bound_value(cell: Cell, constraint: ColumnConstraint) -> Any:
    """Value a cell contributes to rule evaluation; None when absent or invalid."""
    if cell.is_null or check_cell(cell, constraint) is not None:
        return None
    return cell.parsed


def _describe_violation(kind: str, cell: Cell, constraint: ColumnConstraint) -> str:
    name = constraint.name
    if kind == PATTERN:
        return f"{name}={cell.raw!r} does not match pattern {constraint.pattern!r}"
    if kind == TYPE:
        return f"{name}={cell.raw!r} is not a valid {constraint.declared_type.value}"
    if constraint.enum is not None:
        return f"{name}={cell.raw!r} is not one of {list(constraint.enum)}"
    assert constraint.range is not None
    return f"{name}={cell.raw!r} is outside range {constraint.range.describe()}"


def detect_invalid(table: Table, schema: TableConstraint) -> list[Issue]:
    """Pattern, type and range/enumeration violations of non-null cells."""
    issues = []
    for constraint in schema.columns:
        for row, cell in table.column_cells(constraint.name):
            kind = check_cell(cell, constraint)
            if kind is None:
                continue
            issues.append(
                make_issue(
                    table.name,
                    rows=(row,),
                    columns=(constraint.name,),
                    scope=Scope.CELL,
                    attribute=Attribute.INVALID,
                    constraint=kind,
                    evidence=_describe_violation(kind, cell, constraint),
                )
            )
    return sort_issues(issues)


# ---------------------------------------------------------------------------
# Key grouping
# ---------------------------------------------------------------------------


def _canonical(cell: Cell) -> str | None:
    return None if cell.is_null else cell.raw


def key_groups(table: Table, key: Sequence[str]) -> dict[tuple[str, ...], list[int]]:
    """Group row indexes by raw key values. Rows with an absent key part are skipped."""
    indexes = [table.column_index(c) for c in key]
    groups: dict[tuple[str, ...], list[int]] = defaultdict(list)
    for i, row in enumerate(table.rows):
        cells = [row[j] for j in indexes]
        if any(cell.is_null for cell in cells):
            continue
        groups[tuple(cell.raw for cell in cells)].append(i)
    return groups


def _format_key(key: Sequence[str], values: tuple[str, ...]) -> str:
    return ", ".join(f"{column}={value!r}" for column, value in zip(key, values, strict=True))


def detect_duplicates(table: Table, schema: TableConstraint) -> list[Issue]:
    """Key-sharing rows that are identical in every cell, one issue per identical set."""
    if not schema.key:
        return []
    issues = []
    for key_values, members in key_groups(table, schema.key).items():
        if len(members) < 2:
            continue
        identical: dict[tuple[str | None, ...], list[int]] = defaultdict(list)
        for i in members:
            identical[tuple(_canonical(cell) for cell in table.rows[i])].append(i)
        for rows in identical.values():
            if len(rows) < 2:
                continue
            issues.append(
                make_issue(
                    table.name,
                    rows=rows,
                    columns=schema.key,
                    scope=Scope.INTER_ROW,
                    attribute=Attribute.DUPLICATE,
                    constraint=DUPLICATE_KEY,
                    evidence=f"rows {rows} are identical and share key "
                    f"{_format_key(schema.key, key_values)}",
                )
            )
    return sort_issues(issues)


def _differing_columns(table: Table, schema: TableConstraint, members: list[int]) -> list[str]:
    differing = []
    for constraint in schema.columns:
        if constraint.name in schema.key:
            continue
        index = table.column_index(constraint.name)
        values = set()
        for i in members:
            cell = table.rows[i][index]
            # Absent required values are already missing issues
            if cell.is_null and constraint.required:
                continue
            values.add(_canonical(cell))
        if len(values) > 1:
            differing.append(constraint.name)
    return differing


def _inter_row_conflicts(table: Table, schema: TableConstraint) -> list[Issue]:
    issues = []
    for key_values, members in key_groups(table, schema.key).items():
        if len(members) < 2:
            continue
        differing = _differing_columns(table, schema, members)
        if not differing:
            continue
        variants = "; ".join(
            f"{column}: {sorted({table.cell(i, column).raw for i in members})}"
            for column in differing
        )
        issues.append(
            make_issue(
                table.name,
                rows=members,
                columns=differing,
                scope=Scope.INTER_ROW,
                attribute=Attribute.CONFLICT,
                constraint=KEY_CONFLICT,
                evidence=f"rows {members} share key {_format_key(schema.key, key_values)} "
                f"but differ in {variants}",
            )
        )
    return issues


# ---------------------------------------------------------------------------
# Missing
# ---------------------------------------------------------------------------


def _cell_missing(table: Table, schema: TableConstraint) -> list[Issue]:
    issues = []
    for constraint in schema.columns:
        if not constraint.required:
            continue
        for row, cell in table.column_cells(constraint.name):
            if not cell.is_null:
                continue
            issues.append(
                make_issue(
                    table.name,
                    rows=(row,),
                    columns=(constraint.name,),
                    scope=Scope.CELL,
                    attribute=Attribute.MISSING,
                    constraint=REQUIRED,
                    evidence=f"required {constraint.name} is absent (raw {cell.raw!r})",
                )
            )
    return issues


def _inter_row_missing(
    table: Table, schema: TableConstraint, expected: Sequence[tuple[str, ...]]
) -> list[Issue]:
    present = set(key_groups(table, schema.key))
    issues = []
    for key_values in dict.fromkeys(expected):
        if len(key_values) != len(schema.key):
            raise DataLoadError(
                f"Expected key {key_values!r} of table '{table.name}' has "
                f"{len(key_values)} part(s), key has {len(schema.key)}"
            )
        if key_values in present:
            continue
        issues.append(
            make_issue(
                table.name,
                columns=schema.key,
                scope=Scope.INTER_ROW,
                attribute=Attribute.MISSING,
                constraint=EXPECTED_KEYS,
                evidence=f"expected key {_format_key(schema.key, key_values)} "
                "is absent from the table",
                detail="\t".join(key_values),
            )
        )
    return issues


def reference_elements(cell: Cell, each_element: bool) -> tuple[str, ...] | None:
    """Raw values a reference cell points at; None when absent or unparsable."""
    if cell.is_null or cell.parse_failed:
        return None
    return tuple(cell.parsed) if each_element else (cell.raw,)


def _target_rows(dataset: Dataset, rule: CrossTableRule) -> dict[str, list[int]]:
    assert rule.target is not None
    index: dict[str, list[int]] = defaultdict(list)
    for i, cell in dataset.table(rule.target.table).column_cells(rule.target.column):
        if not cell.is_null:
            index[cell.raw].append(i)
    return index


def _inter_table_missing(dataset: Dataset, rule: CrossTableRule) -> list[Issue]:
    assert rule.source is not None and rule.target is not None
    targets = _target_rows(dataset, rule)
    source = dataset.table(rule.source.table)
    column = f"{rule.source.table}.{rule.source.column}"
    issues = []
    for row, cell in source.column_cells(rule.source.column):
        elements = reference_elements(cell, rule.source.each_element)
        if elements is None:
            continue
        unmatched = list(dict.fromkeys(e for e in elements if e not in targets))
        if not unmatched:
            continue
        issues.append(
            make_issue(
                rule.tables,
                rows=(row,),
                columns=(column,),
                scope=Scope.INTER_TABLE,
                attribute=Attribute.MISSING,
                constraint=rule.id,
                evidence=f"{column} value(s) {unmatched} not found in {rule.target}",
            )
        )
    return issues


def detect_missing(
    dataset: Dataset, schema: ConstraintSchema, expected_keys: ExpectedKeys | None = None
) -> list[Issue]:
    """Absent required cells, absent expected keys, and dangling references.

    Args:
        dataset: Loaded tables bound to the schema
        schema: Resolved constraint schema
        expected_keys: Baselines by table name; tables not listed fall back to
            the schema's expected_keys file, and are skipped without one

    Raises:
        DataLoadError: an expected-keys file is unreadable or has a malformed key.
    """
    expected_keys = expected_keys or {}
    issues: list[Issue] = []
    for name, table_schema in schema.tables.items():
        table = dataset.table(name)
        issues.extend(_cell_missing(table, table_schema))
        baseline = expected_keys.get(name)
        if baseline is None and table_schema.expected_keys is not None:
            baseline = load_expected_keys(table_schema.expected_keys)
        if baseline is not None:
            issues.extend(_inter_row_missing(table, table_schema, baseline))
    for rule in schema.references():
        issues.extend(_inter_table_missing(dataset, rule))
    return sort_issues(issues)


# ---------------------------------------------------------------------------
# Conflict
# ---------------------------------------------------------------------------


def row_binding(table: Table, schema: TableConstraint, row: int, prefix: str = "") -> dict:
    """Bind every column of a row by name (optionally table-qualified)."""
    return {
        f"{prefix}{constraint.name}": bound_value(cell, constraint)
        for constraint, cell in zip(schema.columns, table.rows[row], strict=True)
    }


def _inter_column_conflicts(table: Table, schema: TableConstraint) -> list[Issue]:
    issues = []
    for rule in schema.row_rules:
        columns = [ref.key for ref in referenced_columns(rule.expr)]
        for row in range(table.row_count):
            binding = row_binding(table, schema, row)
            if eval_rule(rule.expr, binding, rule.tolerance) is not Verdict.VIOLATED:
                continue
            values = ", ".join(f"{c}={table.cell(row, c).raw}" for c in columns)
            issues.append(
                make_issue(
                    table.name,
                    rows=(row,),
                    columns=columns,
                    scope=Scope.INTER_COLUMN,
                    attribute=Attribute.CONFLICT,
                    constraint=rule.id,
                    evidence=f"{rule.source} is violated with {values}",
                )
            )
    return issues


def _baseline_conflicts(table: Table, schema: TableConstraint) -> list[Issue]:
    if schema.baseline_columns is None:
        return []
    issues = []
    for column in table.header:
        if column not in schema.baseline_columns:
            issues.append(
                make_issue(
                    table.name,
                    columns=(column,),
                    scope=Scope.INTER_COLUMN,
                    attribute=Attribute.CONFLICT,
                    constraint=BASELINE,
                    evidence=f"new feature {column!r} is not in the baseline",
                )
            )
    for column in schema.baseline_columns:
        if column not in table.header:
            issues.append(
                make_issue(
                    table.name,
                    columns=(column,),
                    scope=Scope.INTER_COLUMN,
                    attribute=Attribute.CONFLICT,
                    constraint=BASELINE,
                    evidence=f"baseline feature {column!r} is missing from the table",
                    detail="missing",
                )
            )
    return issues


class _JoinedValues:
    """Per-element lookup of joined-table values through a reference."""

    def __init__(self, dataset: Dataset, schema: ConstraintSchema, reference: CrossTableRule):
        assert reference.target is not None
        self.reference = reference
        self.table = dataset.table(reference.target.table)
        self.schema = schema.table(reference.target.table)
        self.targets = _target_rows(dataset, reference)

    def value(self, element: str, column: str) -> Any:
        """The agreed value of a column over the rows matching one element, else None."""
        rows = self.targets.get(element)
        if not rows:
            return None
        constraint = self.schema.column(column)
        values = {bound_value(self.table.cell(i, column), constraint) for i in rows}
        if len(values) != 1:
            return None
        return values.pop()


def _join_binding(
    joined: _JoinedValues, rule: CrossTableRule, elements: tuple[str, ...] | None
) -> dict[str, Any]:
    assert rule.expr is not None
    binding: dict[str, Any] = {}
    for ref in referenced_columns(rule.expr):
        if ref.table != rule.joined_table or ref.table == rule.anchor_table:
            continue
        value = None
        if elements is not None and len(elements) == 1:
            value = joined.value(elements[0], ref.name)
        binding[ref.key] = value
    for agg in aggregates(rule.expr):
        total = None
        if elements is not None:
            parts = [joined.value(e, agg.column.name) for e in elements]
            if all(part is not None for part in parts):
                total = sum(parts)
        binding[agg.key] = total
    return binding


def _inter_table_conflicts(
    dataset: Dataset, schema: ConstraintSchema, rule: CrossTableRule
) -> list[Issue]:
    assert rule.expr is not None and rule.via is not None
    reference = schema.rule(rule.via)
    assert reference.source is not None
    anchor = dataset.table(rule.anchor_table)
    anchor_schema = schema.table(rule.anchor_table)
    joined = _JoinedValues(dataset, schema, reference)
    columns = [ref.key for ref in referenced_columns(rule.expr)]
    columns += [agg.column.key for agg in aggregates(rule.expr)]

    issues = []
    for row in range(anchor.row_count):
        binding = row_binding(anchor, anchor_schema, row, prefix=f"{rule.anchor_table}.")
        cell = anchor.cell(row, reference.source.column)
        binding.update(
            _join_binding(joined, rule, reference_elements(cell, reference.source.each_element))
        )
        if eval_rule(rule.expr, binding, rule.tolerance) is not Verdict.VIOLATED:
            continue
        values = ", ".join(
            f"{key}={_show(binding[key])}" for key in binding if key in _binding_keys(rule)
        )
        issues.append(
            make_issue(
                rule.tables,
                rows=(row,),
                columns=list(dict.fromkeys(columns)),
                scope=Scope.INTER_TABLE,
                attribute=Attribute.CONFLICT,
                constraint=rule.id,
                evidence=f"{rule.expr_source} is violated with {values}",
            )
        )
    return issues


def _show(value: Any) -> str:
    if value is None:
        return "unknown"
    if isinstance(value, float):
        return f"{value:.10g}"
    return repr(value)


def _binding_keys(rule: CrossTableRule) -> set[str]:
    assert rule.expr is not None
    keys = {ref.key for ref in referenced_columns(rule.expr)}
    return keys | {agg.key for agg in aggregates(rule.expr)}


def detect_conflicts(dataset: Dataset, schema: ConstraintSchema) -> list[Issue]:
    """Violated row rules, key-sharing rows that disagree, violated cross-table
    expressions, and header drift from the baseline columns."""
    issues: list[Issue] = []
    for name, table_schema in schema.tables.items():
        table = dataset.table(name)
        issues.extend(_inter_column_conflicts(table, table_schema))
        if table_schema.key:
            issues.extend(_inter_row_conflicts(table, table_schema))
        issues.extend(_baseline_conflicts(table, table_schema))
    for rule in schema.expressions():
        issues.extend(_inter_table_conflicts(dataset, schema, rule))
    return sort_issues(issues)


def detect_integrity(
    dataset: Dataset, schema: ConstraintSchema, expected_keys: ExpectedKeys | None = None
) -> list[Issue]:
    """Run all four integrity detectors and merge their output."""
    issues = detect_missing(dataset, schema, expected_keys)
    for name, table_schema in schema.tables.items():
        table = dataset.table(name)
        issues += detect_invalid(table, table_schema)
        issues += detect_duplicates(table, table_schema)
    issues += detect_conflicts(dataset, schema)
    logger.info("Detected %d integrity issue(s)", len(issues))
    return sort_issues(issues)
