from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .schema import CATEGORICAL_MAX_DISTINCT, ColumnSpec, SchemaError, TableSchema


@dataclass(frozen=True, eq=False)
class Table:
    """Mixed-type records: continuous columns as float64, categorical columns as str."""

    schema: TableSchema
    frame: pd.DataFrame

    def __post_init__(self) -> None:
        if tuple(self.frame.columns) != self.schema.names:
            raise SchemaError(
                f"frame columns {list(self.frame.columns)} "
                f"do not match schema {list(self.schema.names)}"
            )
        if self.frame.isna().to_numpy().any():
            raise SchemaError("table contains missing values")
        for col in self.schema.columns:
            if col.is_categorical:
                bad = ~self.frame[col.name].isin(col.categories)
                if bad.any():
                    pos = int(np.flatnonzero(bad.to_numpy())[0])
                    raise SchemaError(
                        f"value {self.frame[col.name].iloc[pos]!r} "
                        f"not in categories {list(col.categories)}",
                        row=pos + 2,
                        column=col.name,
                    )

    @classmethod
    def from_columns(cls, schema: TableSchema, values: dict) -> Table:
        data = {}
        for col in schema.columns:
            v = values[col.name]
            if col.is_categorical:
                data[col.name] = pd.Series(v, dtype=object).astype(str)
            else:
                data[col.name] = pd.Series(v, dtype=np.float64)
        return cls(schema, pd.DataFrame(data, columns=list(schema.names)))

    @property
    def n_rows(self) -> int:
        return int(len(self.frame))

    @property
    def n_columns(self) -> int:
        return self.schema.n_columns

    def take(self, rows: Sequence[int] | np.ndarray) -> Table:
        picked = self.frame.iloc[np.asarray(rows, dtype=np.int64)]
        return Table(self.schema, picked.reset_index(drop=True))

    def equals(self, other: Table) -> bool:
        return self.schema == other.schema and self.frame.equals(other.frame)

    def category_codes(self, name: str) -> np.ndarray:
        col = self.schema.column(name)
        if not col.is_categorical:
            raise SchemaError("column is not categorical", column=name)
        lookup = {c: k for k, c in enumerate(col.categories)}
        return self.frame[name].map(lookup).to_numpy(dtype=np.int64)

    def to_csv(self, path: str | Path) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        self.frame.to_csv(p, index=False, lineterminator="\n")
        return p


def numeric_matrix(table: Table) -> np.ndarray:
    """Continuous values as-is and categoricals as integer category codes (input for CI tests)."""
    cols = []
    for col in table.schema.columns:
        if col.is_categorical:
            cols.append(table.category_codes(col.name).astype(np.float64))
        else:
            cols.append(table.frame[col.name].to_numpy(dtype=np.float64))
    if not cols:
        return np.zeros((table.n_rows, 0))
    return np.column_stack(cols)


def _category_order(values: Sequence[str]) -> Tuple[str, ...]:
    uniq = sorted(set(values))
    nums = pd.to_numeric(pd.Series(uniq, dtype=object), errors="coerce")
    if nums.notna().all():
        return tuple(s for _, s in sorted(zip(nums.tolist(), uniq)))
    return tuple(uniq)


def infer_schema(frame: pd.DataFrame) -> TableSchema:
    """Categorical when any value is non-numeric, or when an integer-valued column has at most
    10 distinct values. Numeric columns with fractional values are always continuous.
    """
    cols: List[ColumnSpec] = []
    for name in frame.columns:
        raw = frame[name].astype(str)
        nums = pd.to_numeric(raw, errors="coerce")
        if nums.isna().any():
            cols.append(ColumnSpec(str(name), "categorical", _category_order(raw.tolist())))
            continue
        integral = bool(np.all(np.mod(nums.to_numpy(dtype=np.float64), 1.0) == 0.0))
        if integral and raw.nunique() <= CATEGORICAL_MAX_DISTINCT:
            cols.append(ColumnSpec(str(name), "categorical", _category_order(raw.tolist())))
        else:
            cols.append(ColumnSpec(str(name), "continuous"))
    return TableSchema(tuple(cols))


def _read_raw(path: Path) -> pd.DataFrame:
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise SchemaError(f"empty file: {path}") from None
    except pd.errors.ParserError as exc:
        raise SchemaError(f"ragged row: {exc}") from None
    # short rows are padded with NaN by the parser; blank cells arrive as ""
    for pos, name in enumerate(raw.columns):
        cells = raw[name]
        blank = cells.isna() | (cells.fillna("").str.strip() == "")
        if blank.any():
            row = int(np.flatnonzero(blank.to_numpy())[0])
            raise SchemaError("missing value", row=row + 2, column=str(name))
        if str(name).startswith("Unnamed:"):
            raise SchemaError(f"header cell {pos} is empty")
    return raw.apply(lambda s: s.str.strip())


def load_csv(path: str | Path, schema: Optional[TableSchema] = None) -> Table:
    """Parse a header-first CSV into a Table, inferring the schema when none is given.

    Missing values, ragged rows and unparseable numerics raise SchemaError with the line and
    column; nothing is imputed.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"data file not found: {p}")
    raw = _read_raw(p)
    if raw.empty:
        raise SchemaError(f"no data rows in {p}")
    if schema is None:
        schema = infer_schema(raw)
    elif tuple(raw.columns) != schema.names:
        raise SchemaError(f"header {list(raw.columns)} does not match schema {list(schema.names)}")

    data = {}
    for col in schema.columns:
        cells = raw[col.name]
        if col.is_categorical:
            data[col.name] = cells.astype(str)
            continue
        nums = pd.to_numeric(cells, errors="coerce")
        bad = nums.isna() | ~np.isfinite(nums.fillna(0.0))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise SchemaError(
                f"cannot parse {cells.iloc[row]!r} as a number", row=row + 2, column=col.name
            )
        data[col.name] = nums.astype(np.float64)
    frame = pd.DataFrame(data, columns=list(schema.names))
    return Table(schema, frame)


def split(
    table: Table,
    ratio: float,
    seed: int,
    target: Optional[str] = None,
) -> Tuple[Table, Table]:
    """Seeded shuffle-and-cut into (train, test); stratified by a categorical ``target``."""
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    rng = np.random.default_rng(seed)
    n = table.n_rows

    def n_keep(k: int) -> int:
        return int(np.floor(ratio * k + 0.5))

    if target is not None and table.schema.column(target).is_categorical:
        codes = table.category_codes(target)
        train_parts: List[np.ndarray] = []
        test_parts: List[np.ndarray] = []
        for c in range(table.schema.column(target).n_categories):
            idx = rng.permutation(np.flatnonzero(codes == c))
            cut = n_keep(len(idx))
            train_parts.append(idx[:cut])
            test_parts.append(idx[cut:])
        train_idx = rng.permutation(np.concatenate(train_parts))
        test_idx = rng.permutation(np.concatenate(test_parts))
    else:
        perm = rng.permutation(n)
        cut = n_keep(n)
        train_idx, test_idx = perm[:cut], perm[cut:]

    if len(train_idx) == 0 or len(test_idx) == 0:
        raise ValueError(f"split of {n} rows at ratio {ratio} leaves an empty side")
    return table.take(train_idx), table.take(test_idx)
