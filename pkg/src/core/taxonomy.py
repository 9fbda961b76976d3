"""
Label vocabularies for the two classification dimensions and issue scoping.

Enum values are the spellings used in every output format and ticket file.
"""

from enum import Enum


class Scope(str, Enum):
    """Where an integrity issue sits."""

    CELL = "cell"
    INTER_ROW = "inter_row"
    INTER_COLUMN = "inter_column"
    INTER_TABLE = "inter_table"


class Attribute(str, Enum):
    """Attribute dimension: what the defect is."""

    MISSING = "missing"
    INVALID = "invalid"
    DUPLICATE = "duplicate"
    CONFLICT = "conflict"
    BELIEVABILITY = "believability"
    CONSISTENCY = "consistency"
    SYNTACTIC = "syntactic"
    ENCODING = "encoding"

    @property
    def is_smell(self) -> bool:
        return self in SMELL_ATTRIBUTES


INTEGRITY_ATTRIBUTES = (
    Attribute.MISSING,
    Attribute.INVALID,
    Attribute.DUPLICATE,
    Attribute.CONFLICT,
)
SMELL_ATTRIBUTES = (
    Attribute.BELIEVABILITY,
    Attribute.CONSISTENCY,
    Attribute.SYNTACTIC,
    Attribute.ENCODING,
)


class Outcome(str, Enum):
    """Outcome dimension: which constraint family is broken. NONE is reserved for smells."""

    PATTERN = "pattern"
    RANGE = "range"
    RULE = "rule"
    KNOWLEDGE = "knowledge"
    NONE = "none"


INTEGRITY_OUTCOMES = (Outcome.PATTERN, Outcome.RANGE, Outcome.RULE, Outcome.KNOWLEDGE)

# Scopes each integrity attribute may occur at
LEGAL_SCOPES: dict[Attribute, tuple[Scope, ...]] = {
    Attribute.MISSING: (Scope.CELL, Scope.INTER_ROW, Scope.INTER_TABLE),
    Attribute.INVALID: (Scope.CELL,),
    Attribute.DUPLICATE: (Scope.INTER_ROW,),
    Attribute.CONFLICT: (Scope.INTER_ROW, Scope.INTER_COLUMN, Scope.INTER_TABLE),
}


def attributes_at(scope: Scope) -> list[Attribute]:
    """Integrity attributes legal at a scope, in declaration order."""
    return [attr for attr in INTEGRITY_ATTRIBUTES if scope in LEGAL_SCOPES[attr]]
