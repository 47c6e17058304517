from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Dict, Sequence, Tuple

import numpy as np

from core.types import BENCHMARK_NAMES, MIXED_BENCHMARK_NAMES, ColumnKind
from data import Table, write_schema_json
from graph import CausalGraph, read_graph_json, write_graph_json

from .scm import ScmSpec, simulate

logger = logging.getLogger("run")

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "input" / "graphs"

# Structural parameters are drawn once per benchmark from this base seed, so the 10k and 20k
# variants share the same SCM and only the sampling seed changes the rows.
PARAM_SEED_BASE = 7_000
COEF_RANGE = (0.8, 1.2)

_NAME_RE = re.compile(r"^(?P<m>\d+)nodes(?P<mixed>_mixed)?_(?P<k>\d+)k$")

# Per-node kinds and category counts (0 for continuous).
_LAYOUTS: Dict[Tuple[int, bool], Tuple[Tuple[ColumnKind, ...], Tuple[int, ...]]] = {
    (4, False): (("continuous",) * 4, (0, 0, 0, 0)),
    (5, False): (("categorical",) * 5, (3, 2, 3, 2, 2)),
    (6, False): (("continuous",) * 6, (0, 0, 0, 0, 0, 0)),
    (5, True): (
        ("categorical", "continuous", "categorical", "continuous", "continuous"),
        (3, 0, 2, 0, 0),
    ),
}


def benchmark_names() -> Tuple[str, ...]:
    return BENCHMARK_NAMES + MIXED_BENCHMARK_NAMES


def parse_benchmark_name(name: str) -> Tuple[int, int, bool]:
    """'5nodes_20k' -> (5, 20000, False); unknown ids raise ValueError listing the valid ones."""
    m = _NAME_RE.match(name)
    if m is None or name not in benchmark_names():
        raise ValueError(f"unknown benchmark {name!r}; valid: {', '.join(benchmark_names())}")
    return int(m.group("m")), int(m.group("k")) * 1000, m.group("mixed") is not None


def fixture_graph(n_nodes: int) -> CausalGraph:
    return read_graph_json(FIXTURE_DIR / f"{n_nodes}nodes.json")


def random_scm(
    graph: CausalGraph,
    kinds: Sequence[ColumnKind],
    n_categories: Sequence[int],
    param_seed: int,
    n_samples: int = 1000,
    seed: int = 0,
) -> ScmSpec:
    """Draw SCM parameters for ``graph``.

    Coefficients are +-U[0.8, 1.2], noise is unit, CPT rows are Dirichlet(1).
    """
    rng = np.random.default_rng(param_seed)
    coefficients: Dict[Tuple[int, int], float] = {}
    for p, j in sorted(graph.directed):
        if kinds[j] == "continuous":
            sign = 1.0 if rng.random() < 0.5 else -1.0
            coefficients[(p, j)] = sign * float(rng.uniform(*COEF_RANGE))
    cpts: Dict[int, np.ndarray] = {}
    for j in range(graph.n_nodes):
        if kinds[j] != "categorical":
            continue
        pa = sorted(graph.parents(j))
        rows = int(np.prod([n_categories[p] for p in pa])) if pa else 1
        k = int(n_categories[j])
        cpts[j] = rng.dirichlet(np.ones(k), size=rows)
    return ScmSpec(
        graph=graph,
        kinds=tuple(kinds),
        n_categories=tuple(int(k) for k in n_categories),
        coefficients=coefficients,
        noise_std=tuple(1.0 for _ in range(graph.n_nodes)),
        cpts=cpts,
        n_samples=n_samples,
        seed=seed,
    )


def benchmark_spec(name: str, seed: int = 0) -> ScmSpec:
    m, n, mixed = parse_benchmark_name(name)
    kinds, cats = _LAYOUTS[(m, mixed)]
    return random_scm(fixture_graph(m), kinds, cats, PARAM_SEED_BASE + 10 * m + int(mixed), n, seed)


def make_benchmark(name: str, seed: int = 0) -> Tuple[Table, CausalGraph]:
    spec = benchmark_spec(name, seed)
    table = simulate(spec)
    logger.info(
        "BENCHMARK name=%s rows=%d nodes=%d seed=%d", name, table.n_rows, spec.graph.n_nodes, seed
    )
    return table, spec.graph


def write_benchmark(
    table: Table, graph: CausalGraph, out_dir: str | Path, name: str
) -> Dict[str, Path]:
    """Write <name>.csv, <name>.graph.json and <name>.schema.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return {
        "data": table.to_csv(out / f"{name}.csv"),
        "graph": write_graph_json(graph, out / f"{name}.graph.json"),
        "schema": write_schema_json(table.schema, out / f"{name}.schema.json"),
    }
