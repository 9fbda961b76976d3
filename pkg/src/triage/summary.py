"""
Distribution, crosstab and difficulty statistics over labeled tickets.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import pandas as pd

from classify.alignment import is_permitted
from core.errors import TicketError
from core.taxonomy import INTEGRITY_ATTRIBUTES, INTEGRITY_OUTCOMES, Attribute, Outcome
from triage.tickets import METRICS, Ticket

logger = logging.getLogger(__name__)


class SummaryMode(str, Enum):
    ATTRIBUTE_DIST = "attribute_dist"
    OUTCOME_DIST = "outcome_dist"
    ATTRIBUTE_STATS = "attribute_stats"
    OUTCOME_STATS = "outcome_stats"
    CROSSTAB = "crosstab"
    PAIR_STATS = "pair_stats"


ATTRIBUTE_ORDER = [a.value for a in Attribute]
OUTCOME_ORDER = [o.value for o in INTEGRITY_OUTCOMES]
INTEGRITY_ORDER = [a.value for a in INTEGRITY_ATTRIBUTES]


@dataclass(frozen=True)
class CountMatrix:
    """Category counts: one count column for distributions, attribute x outcome for crosstab."""

    frame: pd.DataFrame

    def counts(self) -> dict:
        """Row label -> count (distributions) or row label -> {column label: count}."""
        if list(self.frame.columns) == ["count"]:
            return {label: int(n) for label, n in self.frame["count"].items()}
        return {
            label: {column: int(n) for column, n in row.items()}
            for label, row in self.frame.iterrows()
        }


@dataclass(frozen=True)
class SummaryStats:
    """[mean, max] of every metric per category, plus category counts."""

    frame: pd.DataFrame  # index: category; columns: count, <metric>_mean, <metric>_max

    def counts(self) -> dict:
        return {label: int(n) for label, n in self.frame["count"].items()}

    def stat(self, category, metric: str) -> tuple[float, float]:
        row = self.frame.loc[category]
        return float(row[f"{metric}_mean"]), float(row[f"{metric}_max"])

    @property
    def categories(self) -> list:
        return list(self.frame.index)


def tickets_frame(tickets: list[Ticket]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "id": [t.id for t in tickets],
            "attribute": [t.attribute.value for t in tickets],
            "outcome": [t.outcome.value for t in tickets],
            "severity": [t.severity for t in tickets],
            "priority": [t.priority for t in tickets],
            "days_to_fix": [t.days_to_fix for t in tickets],
            "comment_number": [t.comment_number for t in tickets],
        },
        columns=["id", "attribute", "outcome", *METRICS],
    )


def _integrity_only(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[frame["outcome"].isin(OUTCOME_ORDER)]


def _distribution(values: pd.Series, order: list[str], name: str) -> CountMatrix:
    counts = values.value_counts().reindex(order, fill_value=0).astype(int)
    counts.index.name = name
    return CountMatrix(counts.to_frame("count"))


def _crosstab(frame: pd.DataFrame) -> CountMatrix:
    integrity = _integrity_only(frame)
    table = pd.crosstab(integrity["attribute"], integrity["outcome"])
    table = table.reindex(index=INTEGRITY_ORDER, columns=OUTCOME_ORDER, fill_value=0).astype(int)
    table.index.name, table.columns.name = "attribute", "outcome"
    return CountMatrix(table)


def _stats(frame: pd.DataFrame, by: list[str], order: list) -> SummaryStats:
    if frame.empty:
        raise TicketError("No tickets to summarize")
    grouped = frame.groupby(by, sort=False)
    stats = grouped[list(METRICS)].agg(["mean", "max"]).astype(float)
    stats.columns = [f"{metric}_{stat}" for metric, stat in stats.columns]
    stats.insert(0, "count", grouped.size().astype(int))
    # Canonical category order; categories without tickets are omitted
    present = [label for label in order if label in stats.index]
    return SummaryStats(stats.loc[present])


def _pair_order() -> list[tuple[str, str]]:
    outcomes = [*OUTCOME_ORDER, Outcome.NONE.value]
    return [(a, o) for o in outcomes for a in ATTRIBUTE_ORDER]


def summarize(tickets: list[Ticket], mode: SummaryMode | str) -> CountMatrix | SummaryStats:
    """Aggregate tickets.

    Distribution modes count every category (zeros included); stats modes give
    [mean, max] of severity, priority, days_to_fix and comment_number for each
    category that has tickets. Outcome modes and crosstab cover integrity tickets.

    Raises:
        TicketError: a stats mode over no tickets.
    """
    mode = SummaryMode(mode)
    frame = tickets_frame(tickets)
    logger.debug("Summarizing %d ticket(s) as %s", len(frame), mode.value)
    if mode is SummaryMode.ATTRIBUTE_DIST:
        return _distribution(frame["attribute"], ATTRIBUTE_ORDER, "attribute")
    if mode is SummaryMode.OUTCOME_DIST:
        return _distribution(_integrity_only(frame)["outcome"], OUTCOME_ORDER, "outcome")
    if mode is SummaryMode.CROSSTAB:
        return _crosstab(frame)
    if mode is SummaryMode.ATTRIBUTE_STATS:
        return _stats(frame, ["attribute"], ATTRIBUTE_ORDER)
    if mode is SummaryMode.OUTCOME_STATS:
        return _stats(_integrity_only(frame), ["outcome"], OUTCOME_ORDER)
    return _stats(frame, ["attribute", "outcome"], _pair_order())


def validate_ticket_alignment(tickets: list[Ticket]) -> list[str]:
    """Ids of tickets whose (attribute, outcome) pair is not permitted."""
    return [t.id for t in tickets if not is_permitted(t.attribute, t.outcome)]
