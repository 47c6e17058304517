from __future__ import annotations

from typing import Literal, Tuple

ColumnKind = Literal["continuous", "categorical"]
HeadKind = Literal["tanh", "gumbel"]
ShdMode = Literal["dag", "cpdag"]

COLUMN_KINDS: Tuple[ColumnKind, ColumnKind] = ("continuous", "categorical")

# Benchmark ids of the synthetic suite (N rows, M nodes) plus the mixed-type variant.
BENCHMARK_NAMES: Tuple[str, ...] = (
    "4nodes_10k",
    "5nodes_10k",
    "6nodes_10k",
    "4nodes_20k",
    "5nodes_20k",
    "6nodes_20k",
)
MIXED_BENCHMARK_NAMES: Tuple[str, ...] = ("5nodes_mixed_10k",)
