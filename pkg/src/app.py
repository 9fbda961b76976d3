"""
Command-line application: argument parsing, logging setup and subcommand dispatch.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TextIO

from classify.labeling import label_dataset
from constraints.loader import load_schema
from constraints.model import ConstraintSchema
from core.errors import (
    ConfigError,
    DataLoadError,
    DataTriageError,
    SchemaError,
    SessionAborted,
    TicketError,
)
from core.settings import SettingsManager, SmellParams, parse_smell_params_arg
from detect.integrity import detect_integrity
from detect.smells import detect_smells
from ingest.tables import load_dataset, load_expected_keys
from triage.summary import SummaryMode, summarize, validate_ticket_alignment
from triage.tickets import load_tickets, parse_comments, parse_days, parse_priority, parse_severity
from ui.report import (
    OUTPUT_FORMATS,
    findings_summary,
    issue_record,
    render_summary,
    smell_record,
    write_jsonl,
)
from ui.wizard import LabelingWizard, TicketFields

logger = logging.getLogger(__name__)

APP_NAME = "datatriage"

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_LOAD = 3


class _ArgumentParser(argparse.ArgumentParser):
    """Raise on bad usage instead of exiting, so streams and exit codes stay ours."""

    def error(self, message: str):
        raise ConfigError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog=APP_NAME,
        description="Detect, classify and triage data-quality issues in tabular data.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="more logging (-v info, -vv debug)"
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def data_command(name: str, help_text: str) -> argparse.ArgumentParser:
        command = commands.add_parser(name, help=help_text)
        command.add_argument("--schema", required=True, type=Path, help="schema JSON file")
        command.add_argument("--data", required=True, type=Path, help="CSV file or directory")
        return command

    for name, help_text in (
        ("validate", "report integrity issues"),
        ("classify", "report integrity issues with outcomes, and smells"),
    ):
        command = data_command(name, help_text)
        command.add_argument(
            "--expected-keys",
            action="append",
            default=[],
            metavar="[TABLE=]PATH",
            help="expected-keys baseline (repeatable)",
        )
        if name == "classify":
            command.add_argument("--smell-params", help="JSON object or path to a JSON file")

    smells = data_command("smells", "report data smells")
    smells.add_argument("--smell-params", help="JSON object or path to a JSON file")

    stats = commands.add_parser("stats", help="summarize labeled tickets")
    stats.add_argument("--tickets", required=True, type=Path, help="ticket CSV or JSON-Lines")
    stats.add_argument(
        "--mode", default=SummaryMode.ATTRIBUTE_DIST.value, choices=[m.value for m in SummaryMode]
    )
    stats.add_argument("--format", default="text", choices=OUTPUT_FORMATS)

    wizard = commands.add_parser("wizard", help="label one ticket interactively")
    wizard.add_argument("--ticket-id", default="1")
    wizard.add_argument("--severity", default="Medium")
    wizard.add_argument("--priority", default="Medium")
    wizard.add_argument("--days-to-fix", default="0")
    wizard.add_argument("--comments", default="0")
    return parser


def configure_logging(verbosity: int, stream: TextIO):
    """Send log records to stderr only; stdout carries results."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=stream,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------


def resolve_expected_keys(values: list[str], schema: ConstraintSchema) -> dict:
    """Parse --expected-keys values into baselines by table.

    A bare PATH goes to the only table that declares expected_keys, or failing
    that the only table with a key.

    Raises:
        ConfigError: unknown table, or a bare PATH with no single candidate table.
    """
    baselines = {}
    for value in values:
        table, sep, path = value.partition("=")
        if not sep or table not in schema.tables:
            table, path = _default_baseline_table(schema, value), value
        if not schema.table(table).key:
            raise ConfigError(f"--expected-keys: table '{table}' has no key")
        baselines[table] = load_expected_keys(path)
    return baselines


def _default_baseline_table(schema: ConstraintSchema, value: str) -> str:
    declared = [n for n, t in schema.tables.items() if t.expected_keys is not None]
    keyed = [n for n, t in schema.tables.items() if t.key]
    for candidates in (declared, keyed):
        if len(candidates) == 1:
            return candidates[0]
    raise ConfigError(f"--expected-keys {value!r}: name the table as TABLE=PATH")


def resolve_smell_params(
    settings: SettingsManager, schema: ConstraintSchema, cli_value: str | None
) -> SmellParams:
    """Defaults < environment < schema smell_params < --smell-params."""
    params = settings.get_smell_params().merged(schema.smell_params)
    if cli_value is not None:
        params = params.merged(parse_smell_params_arg(cli_value))
    return params


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args, settings: SettingsManager, stdout: TextIO, stderr: TextIO) -> int:
    schema = load_schema(args.schema)
    baselines = resolve_expected_keys(args.expected_keys, schema)
    dataset = load_dataset(args.data, schema, settings)
    issues = detect_integrity(dataset, schema, baselines)
    write_jsonl((issue_record(issue) for issue in issues), stdout)
    stderr.write(findings_summary(issues, []) + "\n")
    return EXIT_FINDINGS if issues else EXIT_CLEAN


def cmd_smells(args, settings: SettingsManager, stdout: TextIO, stderr: TextIO) -> int:
    schema = load_schema(args.schema)
    params = resolve_smell_params(settings, schema, args.smell_params)
    dataset = load_dataset(args.data, schema, settings)
    smells = detect_smells(dataset, schema, params)
    write_jsonl((smell_record(smell) for smell in smells), stdout)
    stderr.write(findings_summary([], smells) + "\n")
    return EXIT_FINDINGS if smells else EXIT_CLEAN


def cmd_classify(args, settings: SettingsManager, stdout: TextIO, stderr: TextIO) -> int:
    schema = load_schema(args.schema)
    baselines = resolve_expected_keys(args.expected_keys, schema)
    params = resolve_smell_params(settings, schema, args.smell_params)
    dataset = load_dataset(args.data, schema, settings)
    findings = label_dataset(dataset, schema, params, baselines)
    write_jsonl((issue_record(issue) for issue in findings.issues), stdout)
    write_jsonl((smell_record(smell) for smell in findings.smells), stdout)
    stderr.write(findings_summary(findings.issues, findings.smells) + "\n")
    return EXIT_FINDINGS if findings.total else EXIT_CLEAN


def cmd_stats(args, settings: SettingsManager, stdout: TextIO, stderr: TextIO) -> int:
    tickets = load_tickets(args.tickets)
    result = summarize(tickets, args.mode)
    stdout.write(render_summary(result, args.format))
    offending = validate_ticket_alignment(tickets)
    if offending:
        stderr.write(f"{len(offending)} ticket(s) break the alignment rules: {offending}\n")
        return EXIT_FINDINGS
    return EXIT_CLEAN


def cmd_wizard(args, stdin: TextIO, stdout: TextIO, stderr: TextIO) -> int:
    try:
        fields = TicketFields(
            ticket_id=args.ticket_id,
            severity=parse_severity(args.severity),
            priority=parse_priority(args.priority),
            days_to_fix=parse_days(args.days_to_fix),
            comment_number=parse_comments(args.comments),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    ticket = LabelingWizard(stdin, stderr).run(fields)
    stdout.write(json.dumps(ticket.to_record(), ensure_ascii=False) + "\n")
    return EXIT_CLEAN


def run_command(
    argv: list[str] | None = None,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Run one subcommand and return its exit code.

    0 no findings, 1 findings, 2 usage or configuration error, 3 data/schema/ticket load error.
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else argv

    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        stderr.write(f"{e}\n")
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)

    configure_logging(args.verbose, stderr)
    settings = SettingsManager()
    try:
        if args.command == "wizard":
            return cmd_wizard(args, stdin, stdout, stderr)
        handler = {
            "validate": cmd_validate,
            "smells": cmd_smells,
            "classify": cmd_classify,
            "stats": cmd_stats,
        }[args.command]
        return handler(args, settings, stdout, stderr)
    except (ConfigError, SessionAborted) as e:
        stderr.write(f"{APP_NAME}: {e}\n")
        return EXIT_USAGE
    except (SchemaError, DataLoadError, TicketError) as e:
        stderr.write(f"{APP_NAME}: {e}\n")
        return EXIT_LOAD
    except DataTriageError:
        logger.exception("Internal error")
        return EXIT_LOAD
