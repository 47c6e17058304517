from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd

from .schema import SchemaError, TableSchema
from .table import Table

UnknownPolicy = Literal["error", "ignore"]


@dataclass(frozen=True)
class Encoder:
    """Maps tables to real matrices: continuous min-max to [-1, 1], categoricals one-hot.

    ``lows``/``highs`` are learned per continuous column (None for categoricals). A constant
    column encodes to 0 and decodes back to its constant.
    """

    schema: TableSchema
    lows: Tuple[Optional[float], ...]
    highs: Tuple[Optional[float], ...]

    def __post_init__(self) -> None:
        n = self.schema.n_columns
        if len(self.lows) != n or len(self.highs) != n:
            raise ValueError(f"encoder needs {n} low/high entries")
        for col, lo, hi in zip(self.schema.columns, self.lows, self.highs):
            if col.is_categorical:
                continue
            if lo is None or hi is None or not lo <= hi:
                raise ValueError(f"column {col.name!r}: invalid range [{lo}, {hi}]")

    @property
    def width(self) -> int:
        return self.schema.encoded_width

    @property
    def offsets(self) -> Tuple[int, ...]:
        out: List[int] = []
        pos = 0
        for col in self.schema.columns:
            out.append(pos)
            pos += col.encoded_width
        return tuple(out)

    def block(self, index: int) -> slice:
        start = self.offsets[index]
        return slice(start, start + self.schema.columns[index].encoded_width)

    def is_constant(self, index: int) -> bool:
        lo, hi = self.lows[index], self.highs[index]
        return lo is not None and lo == hi

    def encode(self, table: Table, unknown: UnknownPolicy = "error") -> np.ndarray:
        """Encode with the fitted parameters.

        Continuous values outside the fitted range map outside [-1, 1]. Categories missing from
        the schema raise, or encode as an all-zero block with ``unknown="ignore"``.
        """
        if table.schema.names != self.schema.names:
            raise SchemaError(
                f"table columns {list(table.schema.names)} "
                f"do not match encoder {list(self.schema.names)}"
            )
        out = np.zeros((table.n_rows, self.width), dtype=np.float64)
        for k, col in enumerate(self.schema.columns):
            blk = self.block(k)
            cells = table.frame[col.name]
            if col.is_categorical:
                lookup = {c: i for i, c in enumerate(col.categories)}
                codes = cells.astype(str).map(lookup)
                if codes.isna().any():
                    pos = int(np.flatnonzero(codes.isna().to_numpy())[0])
                    if unknown == "error":
                        raise SchemaError(
                            f"unknown category {cells.iloc[pos]!r}", row=pos + 2, column=col.name
                        )
                ok = codes.notna().to_numpy()
                rows = np.flatnonzero(ok)
                out[rows, blk.start + codes[ok].to_numpy(dtype=np.int64)] = 1.0
            else:
                lo, hi = float(self.lows[k]), float(self.highs[k])  # type: ignore[arg-type]
                x = cells.to_numpy(dtype=np.float64)
                out[:, blk.start] = 0.0 if hi == lo else 2.0 * (x - lo) / (hi - lo) - 1.0
        return out

    def decode(self, matrix: np.ndarray) -> Table:
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[1] != self.width:
            width = m.shape[-1] if m.ndim else 0
            raise ValueError(f"matrix width {width} does not match encoder width {self.width}")
        data: Dict[str, Any] = {}
        for k, col in enumerate(self.schema.columns):
            blk = self.block(k)
            if col.is_categorical:
                # np.argmax keeps the first maximum, so ties go to the lowest index
                codes = np.argmax(m[:, blk], axis=1) if m.shape[0] else np.zeros(0, dtype=np.int64)
                cats = np.array(col.categories, dtype=object)
                data[col.name] = pd.Series(cats[codes], dtype=object)
            else:
                lo, hi = float(self.lows[k]), float(self.highs[k])  # type: ignore[arg-type]
                if hi == lo:
                    vals = np.full(m.shape[0], lo)
                else:
                    vals = np.clip(lo + (m[:, blk.start] + 1.0) * 0.5 * (hi - lo), lo, hi)
                data[col.name] = pd.Series(vals, dtype=np.float64)
        return Table(self.schema, pd.DataFrame(data, columns=list(self.schema.names)))

    def to_dict(self) -> Dict[str, Any]:
        return {"schema": self.schema.to_list(), "lows": list(self.lows), "highs": list(self.highs)}

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> Encoder:
        return cls(
            TableSchema.from_list(raw["schema"]),
            tuple(None if v is None else float(v) for v in raw["lows"]),
            tuple(None if v is None else float(v) for v in raw["highs"]),
        )


def fit_encoder(table: Table) -> Encoder:
    if table.n_rows == 0:
        raise ValueError("cannot fit an encoder on an empty table")
    lows: List[Optional[float]] = []
    highs: List[Optional[float]] = []
    for col in table.schema.columns:
        if col.is_categorical:
            lows.append(None)
            highs.append(None)
        else:
            x = table.frame[col.name].to_numpy(dtype=np.float64)
            lows.append(float(x.min()))
            highs.append(float(x.max()))
    return Encoder(table.schema, tuple(lows), tuple(highs))


def fit_encode(table: Table) -> Tuple[np.ndarray, Encoder]:
    enc = fit_encoder(table)
    return enc.encode(table), enc


def decode(matrix: np.ndarray, encoder: Encoder) -> Table:
    return encoder.decode(matrix)
