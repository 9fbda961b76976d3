"""
Exception hierarchy shared by every package.

Data defects are never raised: they become issues or smells. These exceptions
describe malformed inputs to the tool itself (schema, CSV, tickets, flags).
"""


class DataTriageError(Exception):
    """Base class for all errors raised by DataTriage."""


class ConfigError(DataTriageError):
    """Invalid configuration value (CLI flag, environment variable, smell params)."""


class SchemaError(DataTriageError):
    """Schema file is malformed or references unknown tables/columns."""

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class RuleSyntaxError(SchemaError):
    """Lexical or parse error inside a rule expression."""

    def __init__(self, message: str, source: str, position: int):
        self.source = source
        self.position = position
        super().__init__(f"{message} at position {position} in {source!r}")


class RuleTypeError(SchemaError):
    """Rule expression is syntactically valid but ill-typed."""


class DataLoadError(DataTriageError):
    """A CSV table or baseline file could not be loaded."""


class TicketError(DataTriageError):
    """A ticket file contains an unreadable or out-of-vocabulary record."""


class ContractError(DataTriageError):
    """An internal invariant was broken. Indicates a detector bug, never bad user data."""


class SessionAborted(DataTriageError):
    """The interactive session ended before every question was answered."""
