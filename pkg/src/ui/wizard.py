"""
Interactive labeling wizard.

Walks the attribute decision tree one question at a time. Menus only offer
options that are legal given the earlier answers, and the outcome is computed
from the answers rather than asked, so the emitted ticket is always aligned.
"""

import logging
from dataclasses import dataclass
from typing import TextIO

from classify.alignment import align
from core.errors import SessionAborted
from core.taxonomy import SMELL_ATTRIBUTES, Attribute, Outcome, Scope, attributes_at
from triage.tickets import Ticket

logger = logging.getLogger(__name__)

YES, NO = "yes", "no"
PATTERN_OR_TYPE = "pattern/type"
RANGE = "range"

_ALIASES = {"y": YES, "n": NO, "pattern": PATTERN_OR_TYPE, "type": PATTERN_OR_TYPE}


@dataclass(frozen=True)
class TicketFields:
    """Ticket fields supplied up front instead of asked."""

    ticket_id: str = "1"
    severity: int = 1
    priority: int = 2
    days_to_fix: float = 0.0
    comment_number: int = 0


def _display(option: str) -> str:
    return option.replace("_", "-")


def _normalize(answer: str) -> str:
    text = answer.strip().lower().replace("-", "_")
    return _ALIASES.get(text, text)


class LabelingWizard:
    """Question/answer session over text streams."""

    def __init__(self, answers: TextIO, prompts: TextIO):
        self.answers = answers
        self.prompts = prompts

    def _read(self) -> str:
        line = self.answers.readline()
        if line == "":
            raise SessionAborted("Input ended before the ticket was labeled")
        return line

    def ask(self, question: str, options: list[str]) -> str:
        """Show a numbered menu and return the chosen option.

        Accepts the option number or its text; re-asks on anything else.
        """
        self.prompts.write(f"\n{question}\n")
        for number, option in enumerate(options, start=1):
            self.prompts.write(f"  {number}. {_display(option)}\n")
        normalized = {_normalize(option): option for option in options}
        while True:
            self.prompts.write(f"Select 1-{len(options)}: ")
            self.prompts.flush()
            answer = self._read().strip()
            if answer.isdigit() and 1 <= int(answer) <= len(options):
                choice = options[int(answer) - 1]
                break
            if _normalize(answer) in normalized:
                choice = normalized[_normalize(answer)]
                break
            self.prompts.write("Invalid choice.\n")
        logger.debug("%s -> %s", question, choice)
        return choice

    def label(self) -> tuple[Attribute, Outcome]:
        """Ask the decision-tree questions and return the (attribute, outcome) pair."""
        breaks = self.ask("Does the issue break an integrity constraint?", [YES, NO])
        if breaks == NO:
            kind = self.ask("Which data smell is it?", [a.value for a in SMELL_ATTRIBUTES])
            return Attribute(kind), Outcome.NONE

        scope = Scope(self.ask("Where does the issue sit?", [s.value for s in Scope]))
        attribute = Attribute(
            self.ask("Which attribute describes it?", [a.value for a in attributes_at(scope)])
        )
        violated_kind = None
        if attribute is Attribute.INVALID:
            violated = self.ask("Which check does the value fail?", [PATTERN_OR_TYPE, RANGE])
            violated_kind = "pattern" if violated == PATTERN_OR_TYPE else "range"
        return attribute, align(attribute, scope, violated_kind)

    def run(self, fields: TicketFields) -> Ticket:
        """Label one ticket.

        Raises:
            SessionAborted: input ended mid-session.
        """
        attribute, outcome = self.label()
        self.prompts.write(f"\nLabeled as ({attribute.value}, {outcome.value})\n")
        return Ticket(
            id=fields.ticket_id,
            attribute=attribute,
            outcome=outcome,
            severity=fields.severity,
            priority=fields.priority,
            days_to_fix=fields.days_to_fix,
            comment_number=fields.comment_number,
        )
