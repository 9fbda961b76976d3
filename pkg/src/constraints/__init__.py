"""Declarative constraint schema."""

from constraints.loader import load_schema, parse_schema
from constraints.model import (
    ColumnConstraint,
    ConstraintSchema,
    CrossTableRule,
    DeclaredType,
    NullPolicy,
    TableConstraint,
)

__all__ = [
    "ColumnConstraint",
    "ConstraintSchema",
    "CrossTableRule",
    "DeclaredType",
    "NullPolicy",
    "TableConstraint",
    "load_schema",
    "parse_schema",
]
