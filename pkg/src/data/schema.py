from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from core.types import COLUMN_KINDS, ColumnKind

# at most this many distinct values makes a numeric column categorical
CATEGORICAL_MAX_DISTINCT = 10


class SchemaError(ValueError):
    """Input data does not fit the table schema; carries the offending location when known."""

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[str] = None
    ) -> None:
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"line {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: ColumnKind
    categories: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in COLUMN_KINDS:
            raise SchemaError(
                f"unknown kind {self.kind!r}; expected one of {COLUMN_KINDS}", column=self.name
            )
        cats = tuple(str(c) for c in self.categories)
        if self.kind == "categorical":
            if not cats:
                raise SchemaError(
                    "categorical column needs at least one category", column=self.name
                )
            if len(set(cats)) != len(cats):
                raise SchemaError("duplicate categories", column=self.name)
        elif cats:
            raise SchemaError("continuous column cannot list categories", column=self.name)
        object.__setattr__(self, "categories", cats)

    @property
    def is_categorical(self) -> bool:
        return self.kind == "categorical"

    @property
    def n_categories(self) -> int:
        return len(self.categories)

    @property
    def encoded_width(self) -> int:
        return self.n_categories if self.is_categorical else 1

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "kind": self.kind}
        if self.is_categorical:
            out["categories"] = list(self.categories)
        return out


@dataclass(frozen=True)
class TableSchema:
    columns: Tuple[ColumnSpec, ...]

    def __post_init__(self) -> None:
        cols = tuple(self.columns)
        if not cols:
            raise SchemaError("schema needs at least one column")
        names = [c.name for c in cols]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise SchemaError(f"duplicate column names: {dupes}")
        object.__setattr__(self, "columns", cols)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    @property
    def n_continuous(self) -> int:
        return sum(1 for c in self.columns if not c.is_categorical)

    @property
    def n_categorical(self) -> int:
        return sum(1 for c in self.columns if c.is_categorical)

    @property
    def encoded_width(self) -> int:
        return sum(c.encoded_width for c in self.columns)

    def column(self, name: str) -> ColumnSpec:
        return self.columns[self.index_of(name)]

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(
                f"no such column; available: {list(self.names)}", column=name
            ) from None

    def to_list(self) -> List[Dict[str, Any]]:
        return [c.to_dict() for c in self.columns]

    @classmethod
    def from_list(cls, raw: Sequence[Dict[str, Any]]) -> TableSchema:
        cols = []
        for k, entry in enumerate(raw):
            if "name" not in entry or "kind" not in entry:
                raise SchemaError(f"schema entry {k} needs 'name' and 'kind'")
            cats = tuple(entry.get("categories", ()))
            cols.append(ColumnSpec(str(entry["name"]), entry["kind"], cats))
        return cls(tuple(cols))


def read_schema_json(path: str | Path) -> TableSchema:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"schema file not found: {p}")
    raw = json.loads(p.read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise SchemaError("schema JSON must be a list of column entries")
    return TableSchema.from_list(raw)


def write_schema_json(schema: TableSchema, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(schema.to_list(), indent=2) + "\n", encoding="utf-8")
    return p
