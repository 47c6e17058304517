"""Tabular data: schema inference, CSV ingestion, encoding and splitting."""

from .encoder import Encoder, decode, fit_encode, fit_encoder
from .schema import (
    CATEGORICAL_MAX_DISTINCT,
    ColumnSpec,
    SchemaError,
    TableSchema,
    read_schema_json,
    write_schema_json,
)
from .table import Table, infer_schema, load_csv, numeric_matrix, split

__all__ = [
    "CATEGORICAL_MAX_DISTINCT",
    "ColumnSpec",
    "Encoder",
    "SchemaError",
    "Table",
    "TableSchema",
    "decode",
    "fit_encode",
    "fit_encoder",
    "infer_schema",
    "load_csv",
    "numeric_matrix",
    "read_schema_json",
    "split",
    "write_schema_json",
]
