"""
Issue record shared by the integrity detectors and the classifier.
"""

import hashlib
import json
from dataclasses import dataclass, replace

from core.errors import ContractError
from core.taxonomy import LEGAL_SCOPES, Attribute, Outcome, Scope

# Built-in constraint tags for checks that are not named schema rules
REQUIRED = "required"
EXPECTED_KEYS = "expected_keys"
PATTERN = "pattern"
TYPE = "type"
RANGE = "range"
DUPLICATE_KEY = "duplicate_key"
KEY_CONFLICT = "key_conflict"
BASELINE = "baseline"


@dataclass(frozen=True)
class Issue:
    """One integrity finding. outcome stays None until classified."""

    id: str
    tables: tuple[str, ...]
    rows: tuple[int, ...]
    columns: tuple[str, ...]
    scope: Scope
    attribute: Attribute
    constraint: str
    evidence: str
    outcome: Outcome | None = None

    @property
    def table(self) -> str:
        return self.tables[0]

    def with_outcome(self, outcome: Outcome) -> "Issue":
        return replace(self, outcome=outcome)

    def sort_key(self) -> tuple:
        return (
            self.tables[0],
            self.rows[0] if self.rows else -1,
            self.columns[0] if self.columns else "",
            self.constraint,
            self.id,
        )


def issue_id(
    tables: tuple[str, ...],
    constraint: str,
    scope: Scope,
    rows: tuple[int, ...],
    columns: tuple[str, ...],
    detail: str = "",
) -> str:
    """Stable id: first table, constraint, and a digest of the location."""
    location = json.dumps([scope.value, list(tables), list(rows), list(columns), detail])
    digest = hashlib.sha1(location.encode("utf-8")).hexdigest()[:10]
    return f"{tables[0]}:{constraint}:{digest}"


def make_issue(
    tables: str | tuple[str, ...],
    *,
    rows: tuple[int, ...] | list[int] = (),
    columns: tuple[str, ...] | list[str] = (),
    scope: Scope,
    attribute: Attribute,
    constraint: str,
    evidence: str,
    detail: str = "",
) -> Issue:
    """Build an Issue, checking the attribute is legal at the scope.

    Raises:
        ContractError: a smell attribute or an attribute/scope pair no detector may emit.
    """
    if isinstance(tables, str):
        tables = (tables,)
    if scope not in LEGAL_SCOPES.get(attribute, ()):
        raise ContractError(f"{attribute.value} cannot occur at scope {scope.value}")
    rows, columns = tuple(rows), tuple(columns)
    return Issue(
        id=issue_id(tables, constraint, scope, rows, columns, detail),
        tables=tables,
        rows=rows,
        columns=columns,
        scope=scope,
        attribute=attribute,
        constraint=constraint,
        evidence=evidence,
    )


def sort_issues(issues: list[Issue]) -> list[Issue]:
    return sorted(issues, key=Issue.sort_key)
