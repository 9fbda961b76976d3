# =============================================================================
# tests/conftest.py — Shared pytest fixtures for DataTriage
# =============================================================================
#
# This file is auto-loaded by pytest before any test module runs.
# It provides:
#   - src/ on sys.path so tests import packages the way main.py does
#   - Paths to the shipped convenience-store corpus and ticket fixture
#   - Builders for small schemas and tables used across test modules
#   - Environment isolation so DATATRIAGE_* variables never leak in
#
# Usage in tests:
#   def test_something(golden_schema, golden_dataset):
#       ...
#
# =============================================================================

import json
import sys
from pathlib import Path

import pytest

# ---------------------------------------------------------------------------
# Add src/ to Python path so imports work in tests
# ---------------------------------------------------------------------------
ROOT_PATH = Path(__file__).parent.parent
SRC_PATH = ROOT_PATH / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

GOLDEN_DIR = ROOT_PATH / "data" / "convenience_store"
TICKETS_PATH = ROOT_PATH / "data" / "tickets" / "synthetic_tickets.csv"


# ---------------------------------------------------------------------------
# Environment isolation: engine settings come only from the test itself
# ---------------------------------------------------------------------------


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch):
    """
    Remove DATATRIAGE_* variables for every test (autouse=True).

    Tests that exercise environment overrides set them explicitly with
    monkeypatch.setenv.
    """
    import os

    for name in list(os.environ):
        if name.startswith("DATATRIAGE_"):
            monkeypatch.delenv(name)


# ---------------------------------------------------------------------------
# Golden corpus: the convenience-store dataset shipped under data/
# ---------------------------------------------------------------------------


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


@pytest.fixture
def golden_schema():
    from constraints.loader import load_schema

    return load_schema(GOLDEN_DIR / "schema.json")


@pytest.fixture
def golden_dataset(golden_schema):
    from ingest.tables import load_dataset

    return load_dataset(GOLDEN_DIR, golden_schema)


@pytest.fixture
def tickets_path():
    return TICKETS_PATH


# ---------------------------------------------------------------------------
# Builders for small in-memory schemas and tables
# ---------------------------------------------------------------------------


@pytest.fixture
def make_schema():
    """
    Factory fixture that parses a schema from a Python dict.

    Usage:
        def test_rules(make_schema):
            schema = make_schema({"tables": {...}})
    """
    from constraints.loader import parse_schema

    def _factory(document: dict, base_dir: Path | None = None):
        return parse_schema(json.dumps(document), base_dir=base_dir)

    return _factory


@pytest.fixture
def make_table():
    """
    Factory fixture that loads a table from a header and rows of raw strings.

    Usage:
        def test_cells(make_table):
            table = make_table("t", ["a", "b"], [["1", "x"]], schema=table_schema)
    """
    import csv
    import io

    from constraints.model import NullPolicy
    from ingest.tables import load_table

    def _factory(name, header, rows, schema=None, null_policy=None):
        buffer = io.StringIO(newline="")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return load_table(buffer.getvalue(), name, null_policy or NullPolicy(), schema)

    return _factory


@pytest.fixture
def write_dataset(tmp_path):
    """
    Factory fixture that writes CSV tables and a schema file into tmp_path.

    Returns (schema_path, data_dir). Useful for command-line tests.
    """

    def _factory(schema: dict, tables: dict[str, str]):
        data_dir = tmp_path / "data"
        data_dir.mkdir(exist_ok=True)
        for name, text in tables.items():
            (data_dir / f"{name}.csv").write_text(text, encoding="utf-8")
        schema_path = tmp_path / "schema.json"
        schema_path.write_text(json.dumps(schema), encoding="utf-8")
        return schema_path, data_dir

    return _factory
