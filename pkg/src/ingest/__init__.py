"""CSV ingestion into immutable tables."""

from ingest.cells import Cell, infer_cell_type
from ingest.tables import (
    Dataset,
    Table,
    dump_table,
    load_dataset,
    load_expected_keys,
    load_table,
)

__all__ = [
    "Cell",
    "Dataset",
    "Table",
    "dump_table",
    "infer_cell_type",
    "load_dataset",
    "load_expected_keys",
    "load_table",
]
