# =============================================================================
# tests/test_cli.py — Tests for the command-line application and report output
# =============================================================================

import io
import json

import pytest

from app import build_parser, resolve_expected_keys, resolve_smell_params, run_command
from core.errors import ConfigError
from core.settings import SettingsManager, SmellParams
from core.taxonomy import Attribute, Outcome, Scope
from detect.issues import make_issue
from triage.summary import summarize
from triage.tickets import load_tickets
from ui.report import findings_summary, issue_record, render_summary

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

CLEAN_SCHEMA = {
    "tables": {
        "item": {
            "columns": {"id": {"type": "integer", "required": True}, "price": {"type": "float"}},
            "key": ["id"],
            "rules": [{"id": "positive", "expr": "price > 0"}],
        }
    }
}


def run(*argv, stdin_text=""):
    """Run the CLI with captured streams; returns (code, stdout, stderr)."""
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run_command(list(argv), stdin=io.StringIO(stdin_text), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def golden_args(command, golden_dir, *extra):
    return [
        command,
        "--schema",
        str(golden_dir / "schema.json"),
        "--data",
        str(golden_dir),
        *extra,
    ]


# ---------------------------------------------------------------------------
# Data commands
# ---------------------------------------------------------------------------


@pytest.mark.integration
class TestDataCommands:
    """Tests for validate, classify and smells."""

    def test_classify_golden(self, golden_dir):
        code, out, err = run(*golden_args("classify", golden_dir))
        assert code == 1
        assert len(out.splitlines()) == 13
        assert "Total: 13 finding(s)" in err

    def test_validate_leaves_outcome_empty(self, golden_dir):
        code, out, _ = run(*golden_args("validate", golden_dir))
        assert code == 1
        records = [json.loads(line) for line in out.splitlines()]
        assert len(records) == 9
        assert all(record["outcome"] is None for record in records)

    def test_smells_golden(self, golden_dir):
        code, out, _ = run(*golden_args("smells", golden_dir))
        assert code == 1
        kinds = [json.loads(line)["kind"] for line in out.splitlines()]
        assert kinds == ["believability", "encoding", "syntactic", "consistency"]

    def test_smell_params_override(self, golden_dir):
        # FinalPrice has 24 values; raising min_n above that silences believability
        code, out, _ = run(*golden_args("smells", golden_dir, "--smell-params", '{"min_n": 50}'))
        assert code == 1
        kinds = [json.loads(line)["kind"] for line in out.splitlines()]
        assert "believability" not in kinds

    def test_expected_keys_flag_replaces_schema_baseline(self, golden_dir, tmp_path):
        baseline = tmp_path / "ids.txt"
        baseline.write_text("\n".join(f"100000000{n}" for n in range(1, 6)) + "\n")
        code, out, _ = run(
            *golden_args("validate", golden_dir, "--expected-keys", f"purchase={baseline}")
        )
        assert code == 1
        constraints = [json.loads(line)["constraint"] for line in out.splitlines()]
        assert "expected_keys" not in constraints
        assert len(constraints) == 8

    def test_clean_dataset(self, write_dataset):
        schema_path, data_dir = write_dataset(CLEAN_SCHEMA, {"item": "id,price\n1,2.5\n2,3.0\n"})
        code, out, err = run("validate", "--schema", str(schema_path), "--data", str(data_dir))
        assert code == 0
        assert out == ""
        assert err.strip() == "No findings."

    def test_logging_goes_to_stderr(self, write_dataset):
        schema_path, data_dir = write_dataset(CLEAN_SCHEMA, {"item": "id,price\n1,2.5\n"})
        code, out, err = run(
            "-vv", "classify", "--schema", str(schema_path), "--data", str(data_dir)
        )
        assert code == 0
        assert out == ""
        assert "INFO" in err or "DEBUG" in err


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------


class TestExitCodes:
    """Tests for usage and load failures."""

    def test_missing_required_flags(self):
        code, out, err = run("classify")
        assert code == 2
        assert out == ""
        assert "--schema" in err

    def test_unknown_command(self):
        assert run("frobnicate")[0] == 2

    def test_bad_smell_params(self, golden_dir):
        code, _, err = run(*golden_args("smells", golden_dir, "--smell-params", '{"depth": 2}'))
        assert code == 2
        assert "Unknown smell parameter" in err

    def test_missing_schema_file(self, golden_dir, tmp_path):
        code, out, _ = run(
            "validate", "--schema", str(tmp_path / "none.json"), "--data", str(golden_dir)
        )
        assert code == 3
        assert out == ""

    def test_invalid_schema(self, write_dataset):
        bad = {"tables": {"item": {"columns": {"id": {}}, "key": ["nope"]}}}
        schema_path, data_dir = write_dataset(bad, {"item": "id\n1\n"})
        code, _, _ = run("validate", "--schema", str(schema_path), "--data", str(data_dir))
        assert code == 3

    def test_bad_ticket_file(self, tmp_path):
        path = tmp_path / "tickets.csv"
        path.write_text("id,attribute\nA,missing\n", encoding="utf-8")
        assert run("stats", "--tickets", str(path))[0] == 3


# ---------------------------------------------------------------------------
# Stats command
# ---------------------------------------------------------------------------


class TestStatsCommand:
    """Tests for the stats subcommand."""

    def test_attribute_dist_csv(self, tickets_path):
        code, out, _ = run("stats", "--tickets", str(tickets_path), "--format", "csv")
        assert code == 0
        assert out.startswith("attribute,count\nmissing,40\ninvalid,10\n")

    def test_crosstab_text(self, tickets_path):
        code, out, _ = run("stats", "--tickets", str(tickets_path), "--mode", "crosstab")
        assert code == 0
        assert "knowledge" in out.splitlines()[0]

    def test_pair_stats_jsonl(self, tickets_path):
        code, out, _ = run(
            "stats", "--tickets", str(tickets_path), "--mode", "pair_stats", "--format", "jsonl"
        )
        assert code == 0
        records = [json.loads(line) for line in out.splitlines()]
        assert len(records) == 9
        assert sum(r["count"] for r in records) == 94

    def test_misaligned_tickets_exit_one(self, tmp_path):
        path = tmp_path / "tickets.csv"
        path.write_text(
            "id,attribute,outcome,severity,priority,days_to_fix,comment_number\n"
            "A,duplicate,knowledge,Low,Low,1,0\n",
            encoding="utf-8",
        )
        code, out, err = run("stats", "--tickets", str(path))
        assert code == 1
        assert "duplicate" in out
        assert "'A'" in err


# ---------------------------------------------------------------------------
# Input resolution
# ---------------------------------------------------------------------------


class TestResolveInputs:
    """Tests for --expected-keys and smell-parameter precedence."""

    def test_named_table(self, golden_schema, tmp_path):
        path = tmp_path / "keys.txt"
        path.write_text("10001\n10002\n")
        baselines = resolve_expected_keys([f"product={path}"], golden_schema)
        assert baselines == {"product": (("10001",), ("10002",))}

    def test_bare_path_goes_to_declaring_table(self, golden_schema, tmp_path):
        path = tmp_path / "keys.txt"
        path.write_text("1000000001\n")
        assert list(resolve_expected_keys([str(path)], golden_schema)) == ["purchase"]

    def test_bare_path_without_single_candidate(self, make_schema, tmp_path):
        schema = make_schema(
            {
                "tables": {
                    "a": {"columns": {"id": {}}, "key": ["id"]},
                    "b": {"columns": {"id": {}}, "key": ["id"]},
                }
            }
        )
        with pytest.raises(ConfigError, match="TABLE=PATH"):
            resolve_expected_keys([str(tmp_path / "keys.txt")], schema)

    def test_table_without_key(self, make_schema, tmp_path):
        schema = make_schema({"tables": {"a": {"columns": {"id": {}}}}})
        with pytest.raises(ConfigError, match="has no key"):
            resolve_expected_keys([f"a={tmp_path / 'keys.txt'}"], schema)

    def test_smell_param_precedence(self, make_schema, monkeypatch):
        schema = make_schema(
            {
                "tables": {"t": {"columns": {"v": {}}}},
                "smell_params": {"iqr_k": 2.0, "min_n": 4},
            }
        )
        monkeypatch.setenv("DATATRIAGE_IQR_K", "1.0")
        monkeypatch.setenv("DATATRIAGE_Z_MAX", "2.5")
        params = resolve_smell_params(SettingsManager(), schema, '{"min_n": 10}')
        assert params == SmellParams(iqr_k=2.0, z_max=2.5, min_n=10)

    def test_parser_defaults(self):
        args = build_parser().parse_args(["wizard"])
        assert (args.ticket_id, args.severity, args.priority) == ("1", "Medium", "Medium")


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


class TestReport:
    """Tests for record and summary rendering."""

    def test_issue_record_field_order(self):
        issue = make_issue(
            "t",
            rows=(2,),
            columns=("a",),
            scope=Scope.CELL,
            attribute=Attribute.INVALID,
            constraint="range",
            evidence="t.a=-1 below min 0",
        ).with_outcome(Outcome.RANGE)
        record = issue_record(issue)
        assert list(record) == [
            "id",
            "tables",
            "rows",
            "columns",
            "scope",
            "attribute",
            "outcome",
            "constraint",
            "evidence",
        ]
        assert record["outcome"] == "range"
        assert record["rows"] == [2]

    def test_empty_summary(self):
        assert findings_summary([], []) == "No findings."

    def test_render_csv_and_jsonl(self, tickets_path):
        result = summarize(load_tickets(tickets_path), "outcome_dist")
        assert render_summary(result, "csv") == (
            "outcome,count\npattern,3\nrange,13\nrule,55\nknowledge,18\n"
        )
        records = [json.loads(line) for line in render_summary(result, "jsonl").splitlines()]
        assert records[0] == {"outcome": "pattern", "count": 3}
