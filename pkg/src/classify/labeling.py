"""
Runs detection over a dataset and attaches outcome labels.
"""

import logging
from typing import NamedTuple

from classify.alignment import align, is_permitted
from constraints.model import ConstraintSchema
from core.errors import ContractError
from core.settings import SmellParams
from core.taxonomy import Attribute
from detect.integrity import ExpectedKeys, detect_integrity
from detect.issues import Issue
from detect.smells import SmellFinding, detect_smells
from ingest.tables import Dataset

logger = logging.getLogger(__name__)


class LabeledFindings(NamedTuple):
    issues: list[Issue]
    smells: list[SmellFinding]

    @property
    def total(self) -> int:
        return len(self.issues) + len(self.smells)


def label_issue(issue: Issue) -> Issue:
    """Attach the aligned outcome. Labeled issues are returned relabeled identically."""
    kind = issue.constraint if issue.attribute is Attribute.INVALID else None
    outcome = align(issue.attribute, issue.scope, kind)
    if not is_permitted(issue.attribute, outcome):
        raise ContractError(f"Alignment produced ({issue.attribute.value}, {outcome.value})")
    return issue.with_outcome(outcome)


def label_dataset(
    dataset: Dataset,
    schema: ConstraintSchema,
    params: SmellParams | None = None,
    expected_keys: ExpectedKeys | None = None,
) -> LabeledFindings:
    """Detect integrity issues and smells; every issue leaves with an outcome."""
    issues = [label_issue(issue) for issue in detect_integrity(dataset, schema, expected_keys)]
    smells = detect_smells(dataset, schema, params)
    logger.info("Labeled %d issue(s) and %d smell(s)", len(issues), len(smells))
    return LabeledFindings(issues, smells)
