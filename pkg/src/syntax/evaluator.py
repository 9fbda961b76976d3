"""
Type checking and tri-state evaluation of rule expressions.
"""

import logging
import math
from collections.abc import Mapping
from enum import Enum
from typing import Any

from core.errors import RuleTypeError
from syntax.nodes import (
    ARITHMETIC_OPS,
    COMPARISON_OPS,
    LOGICAL_OPS,
    Aggregate,
    ColumnRef,
    Literal,
    LiteralKind,
    RuleAst,
    Unary,
    aggregates,
    format_rule,
    referenced_columns,
)

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    """Outcome of evaluating a rule against one binding."""

    HOLDS = "holds"
    VIOLATED = "violated"
    UNKNOWN = "unknown"


# Declared column type -> expression kind
_KIND_OF_TYPE = {
    "integer": "number",
    "float": "number",
    "text": "text",
    "boolean": "boolean",
    "date": "date",
    "id_list": "id_list",
}

_KIND_OF_LITERAL = {
    LiteralKind.INTEGER: "number",
    LiteralKind.FLOAT: "number",
    LiteralKind.TEXT: "text",
    LiteralKind.BOOLEAN: "boolean",
}

_ORDERED_KINDS = frozenset({"number", "text", "date"})


def check_rule(
    node: RuleAst, column_types: Mapping[str, str], *, allow_aggregates: bool = False
) -> str:
    """Resolve column references and type-check the expression.

    Args:
        node: Parsed expression
        column_types: Column key (``name`` or ``table.name``) -> declared type
        allow_aggregates: Whether sum(...) may appear (cross-table rules only)

    Returns:
        The expression kind ("number", "text", "boolean" or "date").

    Raises:
        RuleTypeError: unknown column, aggregate where not allowed, or kind mismatch.
    """
    if isinstance(node, ColumnRef):
        if node.key not in column_types:
            raise RuleTypeError(f"Unknown column '{node.key}'")
        return _KIND_OF_TYPE[column_types[node.key]]
    if isinstance(node, Literal):
        return _KIND_OF_LITERAL[node.kind]
    if isinstance(node, Aggregate):
        if not allow_aggregates:
            raise RuleTypeError(f"Aggregate {node.key} is only allowed in cross-table rules")
        kind = check_rule(node.column, column_types, allow_aggregates=False)
        if kind != "number":
            raise RuleTypeError(f"{node.key} needs a numeric column, got {kind}")
        return "number"
    if isinstance(node, Unary):
        kind = check_rule(node.operand, column_types, allow_aggregates=allow_aggregates)
        expected = "boolean" if node.op == "not" else "number"
        if kind != expected:
            raise RuleTypeError(f"'{node.op}' needs a {expected} operand in {format_rule(node)}")
        return expected
    left = check_rule(node.left, column_types, allow_aggregates=allow_aggregates)
    right = check_rule(node.right, column_types, allow_aggregates=allow_aggregates)
    where = format_rule(node)
    if node.op in ARITHMETIC_OPS:
        if left != "number" or right != "number":
            raise RuleTypeError(f"Arithmetic over non-numbers in {where}")
        return "number"
    if node.op in LOGICAL_OPS:
        if left != "boolean" or right != "boolean":
            raise RuleTypeError(f"'{node.op}' needs boolean operands in {where}")
        return "boolean"
    if left != right:
        raise RuleTypeError(f"Comparison of {left} with {right} in {where}")
    if left == "id_list":
        raise RuleTypeError(f"List columns cannot be compared in {where}")
    if node.op not in ("==", "!=") and left not in _ORDERED_KINDS:
        raise RuleTypeError(f"'{node.op}' is not defined for {left} in {where}")
    return "boolean"


def binding_keys(node: RuleAst) -> list[str]:
    """Keys a binding must provide: column refs, then aggregates."""
    return [ref.key for ref in referenced_columns(node)] + [agg.key for agg in aggregates(node)]


def eval_rule(node: RuleAst, binding: Mapping[str, Any], tolerance: float) -> Verdict:
    """Evaluate a boolean rule.

    Args:
        node: Type-checked expression
        binding: Key -> value (None when absent or unparsable)
        tolerance: Numeric equality holds when |lhs - rhs| <= tolerance

    Returns:
        UNKNOWN if any referenced value is absent or an integer exceeds float
        range during arithmetic, otherwise HOLDS or VIOLATED.
    """
    if any(binding.get(key) is None for key in binding_keys(node)):
        return Verdict.UNKNOWN
    try:
        holds = _eval(node, binding, tolerance)
    except OverflowError:
        logger.debug("Overflow evaluating %s", format_rule(node))
        return Verdict.UNKNOWN
    return Verdict.HOLDS if holds else Verdict.VIOLATED


def _divide(left: float, right: float) -> float:
    if right == 0:
        if left == 0 or math.isnan(left):
            return math.nan
        return math.copysign(math.inf, left) * math.copysign(1.0, right)
    return left / right


def _numeric_equal(left: Any, right: Any, tolerance: float) -> bool:
    if isinstance(left, bool) or isinstance(right, bool):
        return left == right
    if isinstance(left, int | float) and isinstance(right, int | float):
        if math.isinf(left) or math.isinf(right):
            return left == right
        return abs(left - right) <= tolerance
    return left == right


def _eval(node: RuleAst, binding: Mapping[str, Any], tolerance: float) -> Any:
    if isinstance(node, ColumnRef | Aggregate):
        return binding[node.key]
    if isinstance(node, Literal):
        return node.value
    if isinstance(node, Unary):
        value = _eval(node.operand, binding, tolerance)
        return (not value) if node.op == "not" else -value
    op = node.op
    if op == "and":
        return bool(_eval(node.left, binding, tolerance)) and bool(
            _eval(node.right, binding, tolerance)
        )
    if op == "or":
        return bool(_eval(node.left, binding, tolerance)) or bool(
            _eval(node.right, binding, tolerance)
        )
    left = _eval(node.left, binding, tolerance)
    right = _eval(node.right, binding, tolerance)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        return _divide(left, right)
    if op == "==":
        return _numeric_equal(left, right, tolerance)
    if op == "!=":
        return not _numeric_equal(left, right, tolerance)
    if op in COMPARISON_OPS:
        return _compare(op, left, right)
    raise AssertionError(f"unhandled operator {op}")


def _compare(op: str, left: Any, right: Any) -> bool:
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right
