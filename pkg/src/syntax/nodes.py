"""
Rule-expression tree and its printers.
"""

import math
from dataclasses import dataclass
from enum import Enum

from syntax.lexer import quote


class LiteralKind(str, Enum):
    """Literal value kinds."""

    INTEGER = "integer"
    FLOAT = "float"
    TEXT = "text"
    BOOLEAN = "boolean"


@dataclass(frozen=True)
class ColumnRef:
    """Reference to a column, optionally qualified as table.column."""

    name: str
    table: str | None = None

    @property
    def key(self) -> str:
        return f"{self.table}.{self.name}" if self.table else self.name


@dataclass(frozen=True)
class Literal:
    value: int | float | str | bool
    kind: LiteralKind


@dataclass(frozen=True)
class Unary:
    op: str  # "not" or "-"
    operand: "RuleAst"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "RuleAst"
    right: "RuleAst"


@dataclass(frozen=True)
class Aggregate:
    """sum(table.column) over the rows joined through a cross-table reference."""

    func: str
    column: ColumnRef

    @property
    def key(self) -> str:
        return f"{self.func}({self.column.key})"


RuleAst = ColumnRef | Literal | Unary | Binary | Aggregate

# Binding strength, loosest first
PRECEDENCE: dict[str, int] = {
    "or": 1,
    "and": 2,
    "==": 3,
    "!=": 3,
    "<": 3,
    "<=": 3,
    ">": 3,
    ">=": 3,
    "+": 4,
    "-": 4,
    "*": 5,
    "/": 5,
}
UNARY_LEVEL = 6
ATOM_LEVEL = 7

ARITHMETIC_OPS = frozenset({"+", "-", "*", "/"})
COMPARISON_OPS = frozenset({"==", "!=", "<", "<=", ">", ">="})
LOGICAL_OPS = frozenset({"and", "or"})


def _level(node: RuleAst) -> int:
    if isinstance(node, Binary):
        return PRECEDENCE[node.op]
    if isinstance(node, Unary):
        return UNARY_LEVEL
    return ATOM_LEVEL


def _format_literal(node: Literal) -> str:
    if node.kind is LiteralKind.TEXT:
        return quote(str(node.value))
    if node.kind is LiteralKind.BOOLEAN:
        return "true" if node.value else "false"
    if isinstance(node.value, float) and math.isinf(node.value):
        # out-of-range literals overflow back to infinity when reparsed
        return "1e999" if node.value > 0 else "-1e999"
    return repr(node.value)


def _format_unary(node: Unary, operand: str) -> str:
    return f"not {operand}" if node.op == "not" else f"-{operand}"


def format_rule(node: RuleAst) -> str:
    """Print with the fewest parentheses that preserve the tree."""
    if isinstance(node, ColumnRef):
        return node.key
    if isinstance(node, Aggregate):
        return node.key
    if isinstance(node, Literal):
        return _format_literal(node)
    if isinstance(node, Unary):
        inner = format_rule(node.operand)
        if _level(node.operand) < UNARY_LEVEL:
            inner = f"({inner})"
        return _format_unary(node, inner)
    level = PRECEDENCE[node.op]
    left = format_rule(node.left)
    right = format_rule(node.right)
    # Left-associative: equal level on the right needs parentheses
    if _level(node.left) < level:
        left = f"({left})"
    if _level(node.right) <= level:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def format_rule_full(node: RuleAst) -> str:
    """Print with every operator node parenthesised."""
    if isinstance(node, ColumnRef | Aggregate):
        return node.key
    if isinstance(node, Literal):
        return _format_literal(node)
    if isinstance(node, Unary):
        return f"({_format_unary(node, format_rule_full(node.operand))})"
    return f"({format_rule_full(node.left)} {node.op} {format_rule_full(node.right)})"


def walk(node: RuleAst):
    """Yield every node, parents before children, left to right."""
    yield node
    if isinstance(node, Unary):
        yield from walk(node.operand)
    elif isinstance(node, Binary):
        yield from walk(node.left)
        yield from walk(node.right)


def referenced_columns(node: RuleAst) -> list[ColumnRef]:
    """Column references outside aggregates, in first-appearance order."""
    seen: dict[str, ColumnRef] = {}
    for child in walk(node):
        if isinstance(child, ColumnRef):
            seen.setdefault(child.key, child)
    return list(seen.values())


def aggregates(node: RuleAst) -> list[Aggregate]:
    """Aggregate nodes in first-appearance order, without repeats."""
    seen: dict[str, Aggregate] = {}
    for child in walk(node):
        if isinstance(child, Aggregate):
            seen.setdefault(child.key, child)
    return list(seen.values())
