"""
CSV ingestion: tables, datasets and expected-key baselines.
"""

import csv
import io
import logging
from collections.abc import Iterator, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from constraints.model import ConstraintSchema, DeclaredType, NullPolicy, TableConstraint
from core.errors import DataLoadError
from core.settings import SettingsManager
from ingest.cells import Cell, make_cell

logger = logging.getLogger(__name__)

KEY_SEPARATOR = "\t"


@dataclass(frozen=True)
class Table:
    """An immutable loaded table. Row i of the CSV body is rows[i]."""

    name: str
    header: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...] = ()

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def column_index(self, column: str) -> int:
        return self.header.index(column)

    def column_cells(self, column: str) -> Iterator[tuple[int, Cell]]:
        """Yield (row index, cell) pairs for one column."""
        index = self.column_index(column)
        for i, row in enumerate(self.rows):
            yield i, row[index]

    def cell(self, row: int, column: str) -> Cell:
        return self.rows[row][self.column_index(column)]


@dataclass(frozen=True)
class Dataset:
    """Name-indexed tables."""

    tables: Mapping[str, Table] = field(default_factory=dict)

    def table(self, name: str) -> Table:
        return self.tables[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tables


def _check_header(header: list[str], schema: TableConstraint) -> None:
    expected = list(schema.column_names)
    if header == expected:
        return
    missing = [c for c in expected if c not in header]
    extra = [c for c in header if c not in expected]
    if not missing and not extra:
        raise DataLoadError(
            f"Table '{schema.name}': header order {header} differs from schema order {expected}"
        )
    raise DataLoadError(
        f"Table '{schema.name}': header mismatch, missing {missing}, unexpected {extra}"
    )


def load_table(
    csv_text: str,
    name: str,
    null_policy: NullPolicy | None = None,
    schema: TableConstraint | None = None,
) -> Table:
    """Parse RFC-4180 CSV text into a Table.

    Args:
        csv_text: Full CSV text, first record is the header
        name: Table name
        null_policy: Raw values treated as absent
        schema: When given, the header must match it and cells parse by declared type

    Raises:
        DataLoadError: empty input, header mismatch, ragged row or malformed quoting.
    """
    null_policy = null_policy or NullPolicy()
    reader = csv.reader(io.StringIO(csv_text, newline=""), strict=True)
    try:
        records = list(reader)
    except csv.Error as e:
        raise DataLoadError(f"Table '{name}': CSV error at line {reader.line_num}: {e}") from e

    while records and not records[0]:
        records.pop(0)
    if not records:
        raise DataLoadError(f"Table '{name}': empty input, no header row")
    header, body = records[0], records[1:]
    # A blank line is one empty field in a one-column table, and nothing otherwise
    body = [record or [""] for record in body] if len(header) == 1 else [r for r in body if r]
    if len(set(header)) != len(header):
        raise DataLoadError(f"Table '{name}': duplicate column names in header {header}")
    declared: list[DeclaredType | None] = [None] * len(header)
    if schema is not None:
        _check_header(header, schema)
        declared = [schema.column(c).declared_type for c in header]

    rows = []
    for i, record in enumerate(body):
        if len(record) != len(header):
            raise DataLoadError(
                f"Table '{name}': row {i} has {len(record)} fields, expected {len(header)}"
            )
        rows.append(
            tuple(make_cell(raw, null_policy, d) for raw, d in zip(record, declared, strict=True))
        )

    logger.debug("Loaded table %s: %d rows x %d columns", name, len(rows), len(header))
    return Table(name=name, header=tuple(header), rows=tuple(rows))


def dump_table(table: Table) -> str:
    """Serialize a table back to CSV (CRLF line endings, minimal quoting)."""
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([cell.raw for cell in row])
    return buffer.getvalue()


def _read_text(path: Path) -> str:
    try:
        with open(path, encoding="utf-8-sig", newline="") as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise DataLoadError(f"Cannot read {path}: {e}") from e


def load_table_file(
    path: Path, null_policy: NullPolicy | None = None, schema: TableConstraint | None = None
) -> Table:
    """Load one CSV file; the table name is the file stem."""
    return load_table(_read_text(path), path.stem, null_policy, schema)


def load_dataset(
    path: str | Path,
    schema: ConstraintSchema | None = None,
    settings: SettingsManager | None = None,
) -> Dataset:
    """Load a CSV file or a directory of *.csv files.

    Tables are read concurrently; the Dataset is assembled afterwards in name order.

    Raises:
        DataLoadError: missing path, a schema table with no file, or any table load error.
    """
    path = Path(path)
    settings = settings or SettingsManager()
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
    elif path.is_file():
        files = [path]
    else:
        raise DataLoadError(f"Data path not found: {path}")

    if schema is not None:
        null_policy = schema.null_policy
    else:
        null_policy = NullPolicy(settings.get_null_tokens())
    jobs: dict[str, tuple[Path, TableConstraint | None]] = {}
    for file in files:
        if schema is not None and file.stem not in schema.tables:
            logger.warning("Skipping %s: no table '%s' in schema", file, file.stem)
            continue
        jobs[file.stem] = (file, schema.tables[file.stem] if schema is not None else None)

    if schema is not None:
        absent = sorted(set(schema.tables) - set(jobs))
        if absent:
            raise DataLoadError(f"No CSV file for schema table(s) {absent} under {path}")

    with ThreadPoolExecutor(max_workers=settings.get_max_workers()) as pool:
        futures = {
            name: pool.submit(load_table_file, file, null_policy, table_schema)
            for name, (file, table_schema) in jobs.items()
        }
        tables = {name: futures[name].result() for name in sorted(futures)}

    logger.info("Loaded %d table(s) from %s", len(tables), path)
    return Dataset(tables=tables)


def load_expected_keys(path: str | Path) -> tuple[tuple[str, ...], ...]:
    """Read an expected-keys baseline: one key per line, composite parts TAB-joined.

    Raises:
        DataLoadError: the file cannot be read.
    """
    text = _read_text(Path(path))
    keys = []
    for line in text.splitlines():
        if line == "":
            continue
        keys.append(tuple(line.split(KEY_SEPARATOR)))
    return tuple(keys)
