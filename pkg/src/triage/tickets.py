"""
Labeled issue tickets: parsing from CSV or JSON-Lines.
"""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from core.errors import TicketError
from core.taxonomy import Attribute, Outcome

logger = logging.getLogger(__name__)

# Ordinal = position in the tuple
SEVERITY_LEVELS = ("Low", "Medium", "High", "Critical")
PRIORITY_LEVELS = ("Lowest", "Low", "Medium", "High", "Highest")

TICKET_FIELDS = (
    "id",
    "attribute",
    "outcome",
    "severity",
    "priority",
    "days_to_fix",
    "comment_number",
)

JSONL_SUFFIXES = frozenset({".jsonl", ".ndjson", ".json"})

METRICS = ("severity", "priority", "days_to_fix", "comment_number")


@dataclass(frozen=True)
class Ticket:
    """One labeled issue ticket with its difficulty metrics."""

    id: str
    attribute: Attribute
    outcome: Outcome
    severity: int
    priority: int
    days_to_fix: float
    comment_number: int

    def to_record(self) -> dict[str, Any]:
        """Ticket-format record; levels are written as words."""
        return {
            "id": self.id,
            "attribute": self.attribute.value,
            "outcome": self.outcome.value,
            "severity": SEVERITY_LEVELS[self.severity],
            "priority": PRIORITY_LEVELS[self.priority],
            "days_to_fix": self.days_to_fix,
            "comment_number": self.comment_number,
        }


def parse_level(value: Any, levels: tuple[str, ...], field: str) -> int:
    """Map a level word (case-insensitive) or an in-range ordinal to its ordinal.

    Raises:
        ValueError: unknown word or ordinal out of range.
    """
    if isinstance(value, bool):
        raise ValueError(f"{field} {value!r} is not a level")
    if isinstance(value, int):
        ordinal = value
    else:
        text = str(value).strip()
        lowered = [level.lower() for level in levels]
        if text.lower() in lowered:
            return lowered.index(text.lower())
        if not text.isdigit():
            raise ValueError(f"unknown {field} {text!r}, expected one of {list(levels)}")
        ordinal = int(text)
    if not 0 <= ordinal < len(levels):
        raise ValueError(f"{field} {ordinal} is outside 0..{len(levels) - 1}")
    return ordinal


def parse_severity(value: Any) -> int:
    return parse_level(value, SEVERITY_LEVELS, "severity")


def parse_priority(value: Any) -> int:
    return parse_level(value, PRIORITY_LEVELS, "priority")


def parse_days(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError(f"days_to_fix {value!r} is not a number")
    try:
        days = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"days_to_fix {value!r} is not a number") from None
    if not math.isfinite(days) or days < 0:
        raise ValueError(f"days_to_fix must be a non-negative number, got {value!r}")
    return days


def parse_comments(value: Any) -> int:
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ValueError(f"comment_number {value!r} is not an integer")
    try:
        count = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"comment_number {value!r} is not an integer") from None
    if count < 0:
        raise ValueError(f"comment_number must be non-negative, got {value!r}")
    return count


def _ticket(record: dict[str, Any], where: str) -> Ticket:
    absent = [name for name in TICKET_FIELDS if record.get(name) is None]
    if absent:
        raise TicketError(f"{where}: missing field(s) {absent}")
    try:
        return Ticket(
            id=str(record["id"]),
            attribute=Attribute(str(record["attribute"]).strip().lower()),
            outcome=Outcome(str(record["outcome"]).strip().lower()),
            severity=parse_severity(record["severity"]),
            priority=parse_priority(record["priority"]),
            days_to_fix=parse_days(record["days_to_fix"]),
            comment_number=parse_comments(record["comment_number"]),
        )
    except ValueError as e:
        raise TicketError(f"{where}: {e}") from e


def parse_tickets(ticket_file: str, fmt: str = "csv") -> list[Ticket]:
    """Parse ticket text.

    Args:
        ticket_file: Whole file contents
        fmt: "csv" (header row with the ticket field names) or "jsonl"

    Raises:
        TicketError: malformed record, unknown level word or label, negative metric.
    """
    if fmt == "jsonl":
        tickets = []
        for number, line in enumerate(ticket_file.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise TicketError(f"line {number}: not valid JSON ({e.msg})") from e
            if not isinstance(record, dict):
                raise TicketError(f"line {number}: expected a JSON object")
            tickets.append(_ticket(record, f"line {number}"))
        return tickets
    if fmt != "csv":
        raise TicketError(f"Unknown ticket format {fmt!r}")

    reader = csv.DictReader(io.StringIO(ticket_file, newline=""))
    header = reader.fieldnames or []
    absent = [name for name in TICKET_FIELDS if name not in header]
    if absent:
        raise TicketError(f"Ticket header lacks column(s) {absent}")
    # Row 1 is the first record after the header
    return [_ticket(record, f"row {row}") for row, record in enumerate(reader, start=1)]


def load_tickets(path: str | Path) -> list[Ticket]:
    """Read a ticket file, choosing JSON-Lines by extension and CSV otherwise."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8-sig", newline="") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise TicketError(f"Cannot read ticket file {path}: {e}") from e
    fmt = "jsonl" if path.suffix.lower() in JSONL_SUFFIXES else "csv"
    tickets = parse_tickets(text, fmt)
    logger.info("Loaded %d ticket(s) from %s", len(tickets), path)
    return tickets
