from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Tuple

import numpy as np

from core.types import ColumnKind
from data import ColumnSpec, Table, TableSchema
from graph import CausalGraph, topological_order

logger = logging.getLogger("run")

CPT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ScmSpec:
    """Ground-truth structural causal model over the nodes of ``graph``.

    Continuous node j: X_j = sum_p beta[p, j] * f(X_p) + N(0, noise_std[j]^2), where f is the
    identity for continuous parents and the centred code c - (K - 1) / 2 for categorical ones.
    Categorical node j draws from ``cpts[j]``, one row per configuration of its (categorical)
    parents in ascending node order, the last parent varying fastest.
    """

    graph: CausalGraph
    kinds: Tuple[ColumnKind, ...]
    n_categories: Tuple[int, ...]
    coefficients: Mapping[Tuple[int, int], float] = field(default_factory=dict)
    noise_std: Tuple[float, ...] = ()
    cpts: Mapping[int, np.ndarray] = field(default_factory=dict)
    n_samples: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        g = self.graph
        m = g.n_nodes
        if g.undirected:
            raise ValueError("SCM graph must be fully directed")
        topological_order(g)
        if len(self.kinds) != m or len(self.n_categories) != m:
            raise ValueError(f"kinds and n_categories need {m} entries")
        if self.n_samples < 0:
            raise ValueError(f"n_samples must be >= 0, got {self.n_samples}")
        noise = tuple(self.noise_std) if self.noise_std else tuple(1.0 for _ in range(m))
        if len(noise) != m:
            raise ValueError(f"noise_std needs {m} entries")
        object.__setattr__(self, "noise_std", noise)

        for j in range(m):
            pa = sorted(g.parents(j))
            if self.kinds[j] == "continuous":
                if not noise[j] > 0:
                    raise ValueError(f"node {j}: noise std must be > 0, got {noise[j]}")
                for p in pa:
                    if (p, j) not in self.coefficients:
                        raise ValueError(f"edge {p}->{j} has no coefficient")
                continue
            k = int(self.n_categories[j])
            if k < 2:
                raise ValueError(f"node {j}: categorical nodes need >= 2 categories, got {k}")
            for p in pa:
                if self.kinds[p] != "categorical":
                    raise ValueError(
                        f"node {j}: categorical node cannot have continuous parent {p}"
                    )
            if j not in self.cpts:
                raise ValueError(f"node {j}: missing CPT")
            cpt = np.asarray(self.cpts[j], dtype=np.float64)
            rows = int(np.prod([self.n_categories[p] for p in pa])) if pa else 1
            if cpt.ndim != 2 or cpt.shape[1] != k:
                raise ValueError(f"node {j}: CPT must have {k} columns, got shape {cpt.shape}")
            if cpt.shape[0] != rows:
                raise ValueError(
                    f"node {j}: CPT missing a parent configuration "
                    f"(expected {rows} rows, got {cpt.shape[0]})"
                )
            if np.any(cpt < 0) or np.any(np.abs(cpt.sum(axis=1) - 1.0) > CPT_TOL):
                raise ValueError(f"node {j}: CPT rows must be probabilities summing to 1")

    def with_run(self, n_samples: int, seed: int) -> ScmSpec:
        return replace(self, n_samples=int(n_samples), seed=int(seed))

    def schema(self) -> TableSchema:
        cols = []
        for label, kind, k in zip(self.graph.labels, self.kinds, self.n_categories):
            if kind == "categorical":
                cols.append(ColumnSpec(label, "categorical", tuple(str(c) for c in range(int(k)))))
            else:
                cols.append(ColumnSpec(label, "continuous"))
        return TableSchema(tuple(cols))


def _draw_categories(rng: np.random.Generator, probs: np.ndarray) -> np.ndarray:
    u = rng.random(probs.shape[0])
    cum = np.cumsum(probs, axis=1)
    codes = (u[:, None] >= cum).sum(axis=1)
    return np.minimum(codes, probs.shape[1] - 1)


def _ancestral(spec: ScmSpec) -> Table:
    g = spec.graph
    n = spec.n_samples
    rng = np.random.default_rng(spec.seed)
    values: Dict[int, np.ndarray] = {}
    for j in topological_order(g):
        pa = sorted(g.parents(j))
        if spec.kinds[j] == "continuous":
            x = np.zeros(n)
            for p in pa:
                beta = float(spec.coefficients[(p, j)])
                if spec.kinds[p] == "categorical":
                    x += beta * (values[p] - (spec.n_categories[p] - 1) / 2.0)
                else:
                    x += beta * values[p]
            values[j] = x + rng.normal(0.0, spec.noise_std[j], size=n)
        else:
            cpt = np.asarray(spec.cpts[j], dtype=np.float64)
            if pa:
                dims = [int(spec.n_categories[p]) for p in pa]
                rows = np.ravel_multi_index([values[p].astype(np.int64) for p in pa], dims)
            else:
                rows = np.zeros(n, dtype=np.int64)
            values[j] = _draw_categories(rng, cpt[rows]).astype(np.float64)

    schema = spec.schema()
    cols: Dict[str, object] = {}
    for j, col in enumerate(schema.columns):
        cols[col.name] = values[j].astype(np.int64).astype(str) if col.is_categorical else values[j]
    logger.debug("SIMULATE nodes=%d rows=%d seed=%d", g.n_nodes, n, spec.seed)
    return Table.from_columns(schema, cols)


def simulate_linear_sem(spec: ScmSpec) -> Table:
    if any(k != "continuous" for k in spec.kinds):
        raise ValueError("simulate_linear_sem needs all nodes continuous")
    return _ancestral(spec)


def simulate_multinomial_bn(spec: ScmSpec) -> Table:
    if any(k != "categorical" for k in spec.kinds):
        raise ValueError("simulate_multinomial_bn needs all nodes categorical")
    return _ancestral(spec)


def simulate_mixed(spec: ScmSpec) -> Table:
    return _ancestral(spec)


def simulate(spec: ScmSpec) -> Table:
    kinds = set(spec.kinds)
    if kinds == {"continuous"}:
        return simulate_linear_sem(spec)
    if kinds == {"categorical"}:
        return simulate_multinomial_bn(spec)
    return simulate_mixed(spec)


def coefficient_matrix(spec: ScmSpec) -> np.ndarray:
    """B with B[p, j] = beta of edge p -> j (zeros elsewhere)."""
    m = spec.graph.n_nodes
    b = np.zeros((m, m))
    for (p, j), beta in spec.coefficients.items():
        b[p, j] = beta
    return b


def implied_covariance(spec: ScmSpec) -> np.ndarray:
    """Covariance of a linear SEM: (I - B)^-T diag(sigma^2) (I - B)^-1 for row-vector samples."""
    m = spec.graph.n_nodes
    inv = np.linalg.inv(np.eye(m) - coefficient_matrix(spec))
    return inv.T @ np.diag(np.square(spec.noise_std)) @ inv
