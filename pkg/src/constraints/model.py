"""
Constraint schema types. All objects are immutable once built by the loader.
"""

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Any

from core.settings import DEFAULT_NULL_TOKENS, DEFAULT_TOLERANCE
from syntax.nodes import RuleAst


class DeclaredType(str, Enum):
    """Value types a column may declare."""

    INTEGER = "integer"
    FLOAT = "float"
    TEXT = "text"
    BOOLEAN = "boolean"
    DATE = "date"
    ID_LIST = "id_list"

    @property
    def is_numeric(self) -> bool:
        return self in (DeclaredType.INTEGER, DeclaredType.FLOAT)


Bound = int | float | date


@dataclass(frozen=True)
class RangeSpec:
    """Interval of accepted values; either bound may be open-ended."""

    min: Bound | None = None
    max: Bound | None = None
    min_inclusive: bool = True
    max_inclusive: bool = True

    def contains(self, value: Any) -> bool:
        if self.min is not None and (
            value < self.min or (value == self.min and not self.min_inclusive)
        ):
            return False
        return not (
            self.max is not None
            and (value > self.max or (value == self.max and not self.max_inclusive))
        )

    def describe(self) -> str:
        lower = "(-inf"
        if self.min is not None:
            lower = ("[" if self.min_inclusive else "(") + str(self.min)
        upper = "+inf)"
        if self.max is not None:
            upper = str(self.max) + ("]" if self.max_inclusive else ")")
        return f"{lower}, {upper}"


@dataclass(frozen=True)
class ColumnConstraint:
    """Constraints declared for one column."""

    name: str
    declared_type: DeclaredType = DeclaredType.TEXT
    pattern: str | None = None
    range: RangeSpec | None = None
    enum: tuple[Any, ...] | None = None
    required: bool = False
    label_like: bool = False
    compiled: re.Pattern[str] | None = field(default=None, compare=False, repr=False)

    def matches_pattern(self, raw: str) -> bool:
        """Patterns are anchored at both ends."""
        return self.compiled is None or self.compiled.fullmatch(raw) is not None

    def in_domain(self, value: Any) -> bool:
        """Check a parsed value against the range or enumeration."""
        if self.enum is not None:
            return value in self.enum
        if self.range is not None:
            return self.range.contains(value)
        return True


@dataclass(frozen=True)
class RowRule:
    """Inter-column rule evaluated on every row of one table."""

    id: str
    source: str
    expr: RuleAst
    tolerance: float = DEFAULT_TOLERANCE


@dataclass(frozen=True)
class TableConstraint:
    """Constraints for one table."""

    name: str
    columns: tuple[ColumnConstraint, ...]
    key: tuple[str, ...] = ()
    row_rules: tuple[RowRule, ...] = ()
    baseline_columns: tuple[str, ...] | None = None
    expected_keys: Path | None = None

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column(self, name: str) -> ColumnConstraint:
        for constraint in self.columns:
            if constraint.name == name:
                return constraint
        raise KeyError(name)

    def column_types(self) -> dict[str, str]:
        return {c.name: c.declared_type.value for c in self.columns}


@dataclass(frozen=True)
class ColumnPath:
    """table.column, optionally with [*] for the elements of a list column."""

    table: str
    column: str
    each_element: bool = False

    def __str__(self) -> str:
        suffix = "[*]" if self.each_element else ""
        return f"{self.table}.{self.column}{suffix}"


@dataclass(frozen=True)
class CrossTableRule:
    """Inter-table rule: a reference (foreign key) or an expression over a join."""

    id: str
    kind: str  # "reference" or "expression"
    source: ColumnPath | None = None
    target: ColumnPath | None = None
    expr: RuleAst | None = None
    expr_source: str = ""
    tolerance: float = DEFAULT_TOLERANCE
    via: str | None = None
    anchor_table: str = ""
    joined_table: str = ""

    @property
    def tables(self) -> tuple[str, str]:
        return (self.anchor_table, self.joined_table)


@dataclass(frozen=True)
class NullPolicy:
    """Raw values treated as absent. Matching is exact: no trimming, case-sensitive."""

    tokens: tuple[str, ...] = DEFAULT_NULL_TOKENS

    def is_null(self, raw: str) -> bool:
        return raw in self.tokens


@dataclass(frozen=True)
class ConstraintSchema:
    """Resolved schema: tables, cross-table rules, null policy and smell overrides."""

    tables: Mapping[str, TableConstraint] = field(default_factory=dict)
    cross_table: tuple[CrossTableRule, ...] = ()
    null_policy: NullPolicy = NullPolicy()
    smell_params: Mapping[str, Any] = field(default_factory=dict)

    def table(self, name: str) -> TableConstraint:
        return self.tables[name]

    def references(self) -> list[CrossTableRule]:
        return [rule for rule in self.cross_table if rule.kind == "reference"]

    def expressions(self) -> list[CrossTableRule]:
        return [rule for rule in self.cross_table if rule.kind == "expression"]

    def rule(self, rule_id: str) -> CrossTableRule:
        for rule in self.cross_table:
            if rule.id == rule_id:
                return rule
        raise KeyError(rule_id)
