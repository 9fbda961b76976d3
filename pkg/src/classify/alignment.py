"""
Alignment between the attribute and outcome dimensions.

The outcome of an integrity issue follows from its attribute, its scope and,
for invalid cells, which check failed. Only the pairs in PERMITTED_PAIRS can
ever be produced.
"""

from core.errors import ContractError
from core.taxonomy import LEGAL_SCOPES, Attribute, Outcome, Scope

PERMITTED_PAIRS: frozenset[tuple[Attribute, Outcome]] = frozenset(
    {
        (Attribute.INVALID, Outcome.PATTERN),
        (Attribute.INVALID, Outcome.RANGE),
        (Attribute.MISSING, Outcome.RANGE),
        (Attribute.MISSING, Outcome.RULE),
        (Attribute.CONFLICT, Outcome.RULE),
        (Attribute.DUPLICATE, Outcome.RULE),
        (Attribute.MISSING, Outcome.KNOWLEDGE),
        (Attribute.CONFLICT, Outcome.KNOWLEDGE),
        (Attribute.BELIEVABILITY, Outcome.NONE),
    }
)

# Violated kind of an invalid cell -> outcome
_INVALID_OUTCOMES = {
    "pattern": Outcome.PATTERN,
    "type": Outcome.PATTERN,
    "range": Outcome.RANGE,
}

_SCOPE_OUTCOMES = {
    Scope.CELL: Outcome.RANGE,
    Scope.INTER_ROW: Outcome.RULE,
    Scope.INTER_COLUMN: Outcome.RULE,
    Scope.INTER_TABLE: Outcome.KNOWLEDGE,
}


def align(attribute: Attribute, scope: Scope, violated_kind: str | None = None) -> Outcome:
    """Compute the outcome label of an integrity issue.

    Args:
        attribute: One of missing, invalid, duplicate, conflict
        scope: Where the issue sits
        violated_kind: pattern, type or range; given exactly when attribute is invalid

    Raises:
        ContractError: the arguments fall outside the alignment domain.
    """
    if scope not in LEGAL_SCOPES.get(attribute, ()):
        raise ContractError(f"No alignment for {attribute.value} at scope {scope.value}")
    if attribute is Attribute.INVALID:
        if violated_kind not in _INVALID_OUTCOMES:
            raise ContractError(f"Invalid cell needs a violated kind, got {violated_kind!r}")
        return _INVALID_OUTCOMES[violated_kind]
    if violated_kind is not None:
        raise ContractError(f"Violated kind only applies to invalid cells, not {attribute.value}")
    return _SCOPE_OUTCOMES[scope]


def is_permitted(attribute: Attribute | str, outcome: Outcome | str) -> bool:
    """Whether an (attribute, outcome) pair is allowed. Every smell pairs with none."""
    attribute, outcome = Attribute(attribute), Outcome(outcome)
    if attribute.is_smell:
        return outcome is Outcome.NONE
    return (attribute, outcome) in PERMITTED_PAIRS
