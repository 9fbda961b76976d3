"""
Schema file loader: JSON text -> fully resolved ConstraintSchema.
"""

import json
import logging
import re
from datetime import date
from pathlib import Path
from types import MappingProxyType
from typing import Any

from constraints.model import (
    ColumnConstraint,
    ColumnPath,
    ConstraintSchema,
    CrossTableRule,
    DeclaredType,
    NullPolicy,
    RangeSpec,
    RowRule,
    TableConstraint,
)
from core.errors import ConfigError, SchemaError
from core.settings import DEFAULT_NULL_TOKENS, SettingsManager, SmellParams
from syntax.evaluator import check_rule
from syntax.nodes import aggregates, referenced_columns
from syntax.parser import parse_rule_expr

logger = logging.getLogger(__name__)

_COLUMN_KEYS = frozenset({"type", "pattern", "range", "enum", "required", "label_like"})
_TABLE_KEYS = frozenset({"columns", "key", "rules", "baseline_columns", "expected_keys"})
_TOP_KEYS = frozenset({"tables", "cross_table", "null_tokens", "smell_params"})
_PATH_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)(\[\*\])?$")


def load_schema(path: str | Path) -> ConstraintSchema:
    """Read and parse a schema file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        raise SchemaError(f"Cannot read schema file {path}: {e}") from e
    return parse_schema(text, base_dir=path.parent)


def parse_schema(
    schema_text: str,
    base_dir: Path | None = None,
    settings: SettingsManager | None = None,
) -> ConstraintSchema:
    """Parse schema JSON and resolve every cross-reference.

    Raises:
        SchemaError: syntax error (with line/column), unknown table or column,
            duplicate rule id, invalid regular expression, aggregate in a row rule.
    """
    try:
        document = json.loads(schema_text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"Schema syntax error: {e.msg}", line=e.lineno, column=e.colno) from e
    settings = settings or SettingsManager()
    return _SchemaBuilder(
        document, base_dir, settings.get_tolerance(), settings.get_null_tokens()
    ).build()


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def _check_keys(obj: dict, allowed: frozenset[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    _require(not unknown, f"Unknown field(s) {unknown} in {where}")


def _string_list(value: Any, where: str) -> list[str]:
    _require(
        isinstance(value, list) and all(isinstance(v, str) for v in value),
        f"{where} must be a list of strings",
    )
    return value


def _tolerance(spec: dict, default: float, where: str) -> float:
    value = spec.get("tolerance", default)
    _require(
        isinstance(value, int | float) and not isinstance(value, bool) and value >= 0,
        f"Tolerance of {where} must be a non-negative number",
    )
    return float(value)


class _SchemaBuilder:
    def __init__(
        self,
        document: Any,
        base_dir: Path | None,
        default_tolerance: float,
        default_null_tokens: tuple[str, ...] = DEFAULT_NULL_TOKENS,
    ):
        _require(isinstance(document, dict), "Schema top level must be a JSON object")
        self.document = document
        self.base_dir = base_dir
        self.default_tolerance = default_tolerance
        self.default_null_tokens = default_null_tokens

    def build(self) -> ConstraintSchema:
        _check_keys(self.document, _TOP_KEYS, "schema")
        tables_spec = self.document.get("tables", {})
        _require(isinstance(tables_spec, dict), "'tables' must be an object")
        cross_spec = self.document.get("cross_table", [])
        _require(isinstance(cross_spec, list), "'cross_table' must be a list")

        # id_list columns are checked against references, so resolve paths first
        list_sources = set()
        for spec in cross_spec:
            if isinstance(spec, dict) and spec.get("kind") == "reference":
                path = self._path(spec.get("from"), f"cross_table rule {spec.get('id')!r}")
                if path.each_element:
                    list_sources.add((path.table, path.column))

        tables = {
            name: self._table(name, spec, list_sources) for name, spec in tables_spec.items()
        }
        cross_table = self._cross_table(cross_spec, tables)

        return ConstraintSchema(
            tables=MappingProxyType(tables),
            cross_table=cross_table,
            null_policy=self._null_policy(),
            smell_params=MappingProxyType(self._smell_params()),
        )

    # -- tables -------------------------------------------------------------

    def _table(self, name: str, spec: Any, list_sources: set) -> TableConstraint:
        where = f"table '{name}'"
        _require(isinstance(spec, dict), f"{where} must be an object")
        _check_keys(spec, _TABLE_KEYS, where)
        columns_spec = spec.get("columns", {})
        _require(isinstance(columns_spec, dict), f"Columns of {where} must be an object")
        columns = tuple(
            self._column(name, col_name, col_spec, list_sources)
            for col_name, col_spec in columns_spec.items()
        )
        names = [c.name for c in columns]

        key = tuple(_string_list(spec.get("key", []), f"Key of {where}"))
        for column in key:
            _require(column in names, f"Key column '{column}' not found in {where}")
        _require(len(set(key)) == len(key), f"Key of {where} repeats a column")

        types = {c.name: c.declared_type.value for c in columns}
        rules: list[RowRule] = []
        seen: set[str] = set()
        for rule_spec in spec.get("rules", []):
            rule = self._row_rule(name, rule_spec, types)
            _require(rule.id not in seen, f"Duplicate rule id '{rule.id}' in {where}")
            seen.add(rule.id)
            rules.append(rule)

        baseline = spec.get("baseline_columns")
        if baseline is not None:
            baseline = tuple(_string_list(baseline, f"baseline_columns of {where}"))

        expected = spec.get("expected_keys")
        expected_path = None
        if expected is not None:
            _require(bool(key), f"{where} declares expected_keys but no key")
            _require(isinstance(expected, str), f"expected_keys of {where} must be a path")
            expected_path = Path(expected)
            if self.base_dir is not None and not expected_path.is_absolute():
                expected_path = self.base_dir / expected_path

        return TableConstraint(
            name=name,
            columns=columns,
            key=key,
            row_rules=tuple(rules),
            baseline_columns=baseline,
            expected_keys=expected_path,
        )

    def _column(self, table: str, name: str, spec: Any, list_sources: set) -> ColumnConstraint:
        where = f"column '{table}.{name}'"
        _require(isinstance(spec, dict), f"{where} must be an object")
        _check_keys(spec, _COLUMN_KEYS, where)
        try:
            declared = DeclaredType(spec.get("type", "text"))
        except ValueError:
            raise SchemaError(f"Unknown type {spec.get('type')!r} for {where}") from None
        if declared is DeclaredType.ID_LIST:
            _require(
                (table, name) in list_sources,
                f"{where} is id_list but no reference rule reads '{table}.{name}[*]'",
            )

        pattern = spec.get("pattern")
        compiled = None
        if pattern is not None:
            _require(isinstance(pattern, str), f"Pattern of {where} must be a string")
            try:
                compiled = re.compile(pattern)
            except re.error as e:
                raise SchemaError(f"Invalid regular expression for {where}: {e}") from e

        _require(
            not ("range" in spec and "enum" in spec), f"{where} declares both range and enum"
        )
        range_spec = self._range(spec["range"], declared, where) if "range" in spec else None
        enum = self._enum(spec["enum"], declared, where) if "enum" in spec else None

        for flag in ("required", "label_like"):
            _require(
                isinstance(spec.get(flag, False), bool), f"'{flag}' of {where} must be boolean"
            )

        return ColumnConstraint(
            name=name,
            declared_type=declared,
            pattern=pattern,
            range=range_spec,
            enum=enum,
            required=spec.get("required", False),
            label_like=spec.get("label_like", False),
            compiled=compiled,
        )

    def _bound(self, value: Any, declared: DeclaredType, where: str):
        if value is None:
            return None
        if declared is DeclaredType.DATE:
            _require(isinstance(value, str), f"Date bounds of {where} must be ISO strings")
            try:
                return date.fromisoformat(value)
            except ValueError:
                raise SchemaError(f"Bad date bound {value!r} for {where}") from None
        _require(
            declared.is_numeric and isinstance(value, int | float) and not isinstance(value, bool),
            f"Range of {where} needs a numeric or date column and numeric bounds",
        )
        return value

    def _range(self, spec: Any, declared: DeclaredType, where: str) -> RangeSpec:
        _require(isinstance(spec, dict), f"Range of {where} must be an object")
        low = self._bound(spec.get("min"), declared, where)
        high = self._bound(spec.get("max"), declared, where)
        _require(low is None or high is None or low <= high, f"Range of {where} has min > max")
        return RangeSpec(
            min=low,
            max=high,
            min_inclusive=bool(spec.get("min_inclusive", True)),
            max_inclusive=bool(spec.get("max_inclusive", True)),
        )

    def _enum(self, values: Any, declared: DeclaredType, where: str) -> tuple:
        _require(declared is not DeclaredType.ID_LIST, f"{where} is id_list, enum not allowed")
        _require(isinstance(values, list) and values, f"Enum of {where} must be a non-empty list")
        normalised = []
        for value in values:
            if declared.is_numeric:
                _require(
                    isinstance(value, int | float) and not isinstance(value, bool),
                    f"Enum of {where} must hold numbers",
                )
                normalised.append(float(value) if declared is DeclaredType.FLOAT else value)
            elif declared is DeclaredType.BOOLEAN:
                _require(isinstance(value, bool), f"Enum of {where} must hold booleans")
                normalised.append(value)
            elif declared is DeclaredType.DATE:
                normalised.append(self._bound(value, declared, where))
            else:
                _require(isinstance(value, str), f"Enum of {where} must hold strings")
                normalised.append(value)
        _require(len(set(normalised)) == len(normalised), f"Enum of {where} has duplicates")
        return tuple(normalised)

    def _row_rule(self, table: str, spec: Any, types: dict[str, str]) -> RowRule:
        _require(isinstance(spec, dict), f"Rules of table '{table}' must be objects")
        rule_id = spec.get("id")
        source = spec.get("expr")
        _require(isinstance(rule_id, str) and rule_id, f"A rule of table '{table}' has no id")
        _require(isinstance(source, str), f"Rule '{rule_id}' of table '{table}' has no expr")
        where = f"rule '{rule_id}' of table '{table}'"
        try:
            expr = parse_rule_expr(source)
            kind = check_rule(expr, types, allow_aggregates=False)
        except SchemaError as e:
            raise SchemaError(f"In {where}: {e}") from e
        _require(kind == "boolean", f"In {where}: expression is {kind}, not boolean")
        return RowRule(
            id=rule_id,
            source=source,
            expr=expr,
            tolerance=_tolerance(spec, self.default_tolerance, where),
        )

    # -- cross-table rules --------------------------------------------------

    def _path(self, value: Any, where: str) -> ColumnPath:
        match = _PATH_RE.match(value) if isinstance(value, str) else None
        _require(match is not None, f"{where}: bad column path {value!r}")
        return ColumnPath(match.group(1), match.group(2), each_element=bool(match.group(3)))

    def _resolve(self, path: ColumnPath, tables: dict[str, TableConstraint], where: str):
        _require(path.table in tables, f"{where}: unknown table '{path.table}'")
        table = tables[path.table]
        _require(
            path.column in table.column_names,
            f"{where}: unknown column '{path.column}' in table '{path.table}'",
        )
        return table.column(path.column)

    def _cross_table(self, specs: list, tables: dict[str, TableConstraint]):
        rules: list[CrossTableRule] = []
        seen: set[str] = set()
        for spec in specs:
            _require(isinstance(spec, dict), "cross_table entries must be objects")
            rule_id = spec.get("id")
            _require(isinstance(rule_id, str) and rule_id, "A cross_table rule has no id")
            _require(rule_id not in seen, f"Duplicate rule id '{rule_id}' in cross_table")
            seen.add(rule_id)
            kind = spec.get("kind")
            if kind == "reference":
                rules.append(self._reference(rule_id, spec, tables))
            elif kind != "expression":
                raise SchemaError(f"cross_table rule '{rule_id}' has unknown kind {kind!r}")
        # Expressions join through references, so they resolve second
        references = {rule.id: rule for rule in rules}
        for spec in specs:
            if spec.get("kind") == "expression":
                rules.append(self._expression(spec["id"], spec, tables, references))
        order = {spec["id"]: i for i, spec in enumerate(specs)}
        return tuple(sorted(rules, key=lambda rule: order[rule.id]))

    def _reference(self, rule_id: str, spec: dict, tables) -> CrossTableRule:
        where = f"cross_table rule '{rule_id}'"
        source = self._path(spec.get("from"), where)
        target = self._path(spec.get("to"), where)
        source_column = self._resolve(source, tables, where)
        self._resolve(target, tables, where)
        _require(not target.each_element, f"{where}: 'to' cannot be a list element path")
        _require(
            target.column in tables[target.table].key,
            f"{where}: '{target}' is not a key column",
        )
        _require(
            source.each_element == (source_column.declared_type is DeclaredType.ID_LIST),
            f"{where}: '[*]' must be used exactly for id_list columns",
        )
        return CrossTableRule(
            id=rule_id,
            kind="reference",
            source=source,
            target=target,
            anchor_table=source.table,
            joined_table=target.table,
        )

    def _expression(self, rule_id: str, spec: dict, tables, references) -> CrossTableRule:
        where = f"cross_table rule '{rule_id}'"
        source = spec.get("expr")
        _require(isinstance(source, str), f"{where} has no expr")
        try:
            expr = parse_rule_expr(source)
        except SchemaError as e:
            raise SchemaError(f"In {where}: {e}") from e

        refs = referenced_columns(expr)
        aggs = aggregates(expr)
        for ref in refs + [agg.column for agg in aggs]:
            _require(ref.table is not None, f"{where}: column '{ref.key}' must be table-qualified")
            _require(ref.table in tables, f"{where}: unknown table '{ref.table}'")

        via = self._via(spec.get("via"), refs, aggs, references, where)
        anchor, joined = via.source.table, via.target.table
        for ref in refs:
            _require(ref.table in (anchor, joined), f"{where}: '{ref.key}' is outside the join")
            _require(
                ref.table == anchor or not via.source.each_element,
                f"{where}: '{ref.key}' joins several rows; aggregate it with sum()",
            )
        for agg in aggs:
            _require(agg.column.table == joined, f"{where}: {agg.key} must aggregate '{joined}'")

        types = {
            f"{table}.{name}": declared
            for table in {anchor, joined}
            for name, declared in tables[table].column_types().items()
        }
        try:
            kind = check_rule(expr, types, allow_aggregates=True)
        except SchemaError as e:
            raise SchemaError(f"In {where}: {e}") from e
        _require(kind == "boolean", f"In {where}: expression is {kind}, not boolean")
        return CrossTableRule(
            id=rule_id,
            kind="expression",
            expr=expr,
            expr_source=source,
            tolerance=_tolerance(spec, self.default_tolerance, where),
            via=via.id,
            anchor_table=anchor,
            joined_table=joined,
        )

    def _via(self, via_id, refs, aggs, references, where: str) -> CrossTableRule:
        if via_id is not None:
            _require(via_id in references, f"{where}: 'via' names unknown reference {via_id!r}")
            return references[via_id]
        named = {ref.table for ref in refs} | {agg.column.table for agg in aggs}
        candidates = [
            rule
            for rule in references.values()
            if {rule.source.table, rule.target.table} == named
            or (len(named) == 1 and rule.source.table in named)
        ]
        _require(len(candidates) == 1, f"{where}: cannot pick a unique reference to join through")
        return candidates[0]

    # -- policy -------------------------------------------------------------

    def _null_policy(self) -> NullPolicy:
        tokens = self.document.get("null_tokens")
        if tokens is None:
            return NullPolicy(self.default_null_tokens)
        tokens = _string_list(tokens, "null_tokens")
        _require(bool(tokens), "null_tokens must not be empty")
        _require(len(set(tokens)) == len(tokens), "null_tokens has duplicates")
        return NullPolicy(tuple(tokens))

    def _smell_params(self) -> dict[str, Any]:
        params = self.document.get("smell_params", {})
        _require(isinstance(params, dict), "smell_params must be an object")
        try:
            SmellParams().merged(params)
        except ConfigError as e:
            raise SchemaError(f"smell_params: {e}") from e
        return dict(params)
