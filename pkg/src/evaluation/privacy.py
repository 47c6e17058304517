from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

# rows of the query matrix per cdist call
CHUNK_ROWS = 1024
DCR_BINS = 40


@dataclass(frozen=True)
class NndrResult:
    values: np.ndarray
    mean: float
    sem: float


def _as_matrix(x: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{what} must be a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{what} contains non-finite values")
    return m


def _check_widths(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"encoded widths differ: {a.shape[1]} vs {b.shape[1]}")


def _chunks(n: int) -> Iterator[slice]:
    for start in range(0, n, CHUNK_ROWS):
        yield slice(start, min(start + CHUNK_ROWS, n))


def _reduce_rows(
    query: np.ndarray, ref: np.ndarray, fn: Callable[[np.ndarray, slice], np.ndarray], width: int
) -> np.ndarray:
    out = np.empty((query.shape[0], width), dtype=np.float64)
    for rows in _chunks(query.shape[0]):
        out[rows] = fn(cdist(query[rows], ref, metric="euclidean"), rows)
    return out


def dcr(fake: np.ndarray, train: np.ndarray) -> np.ndarray:
    """Distance from every fake row to its closest training row."""
    f = _as_matrix(fake, "fake")
    t = _as_matrix(train, "train")
    _check_widths(f, t)
    if t.shape[0] == 0:
        raise ValueError("dcr needs at least one training row")
    return _reduce_rows(f, t, lambda d, _: d.min(axis=1, keepdims=True), 1)[:, 0]


def reid_weights(real: np.ndarray) -> np.ndarray:
    """Per-feature inverse standard deviation; constant features get weight 0."""
    r = _as_matrix(real, "real")
    std = r.std(axis=0)
    w = np.zeros_like(std)
    np.divide(1.0, std, out=w, where=std > 0)
    return w


def reidentification_risk(
    real: np.ndarray, fake: np.ndarray, weights: Optional[np.ndarray] = None
) -> float:
    """Share of real rows whose nearest fake row is closer than their nearest other real row.

    Ties count as safe.
    """
    r = _as_matrix(real, "real")
    f = _as_matrix(fake, "fake")
    _check_widths(r, f)
    if r.shape[0] < 2:
        raise ValueError(f"re-identification risk needs at least 2 real rows, got {r.shape[0]}")
    if f.shape[0] == 0:
        raise ValueError("re-identification risk needs at least one fake row")
    w = reid_weights(r) if weights is None else np.asarray(weights, dtype=np.float64).ravel()
    if w.shape[0] != r.shape[1]:
        raise ValueError(f"weight vector has {w.shape[0]} entries for {r.shape[1]} features")
    rw = r * w
    fw = f * w

    def nearest_other(d: np.ndarray, rows: slice) -> np.ndarray:
        idx = np.arange(rows.start, rows.stop)
        d[idx - rows.start, idx] = np.inf
        return d.min(axis=1, keepdims=True)

    r_real = _reduce_rows(rw, rw, nearest_other, 1)[:, 0]
    r_fake = _reduce_rows(rw, fw, lambda d, _: d.min(axis=1, keepdims=True), 1)[:, 0]
    return float(np.mean(r_fake < r_real))


def _ratio(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    out = np.zeros_like(first)
    both_zero = second == 0.0
    out[both_zero] = 1.0
    pos = first > 0.0
    out[pos] = first[pos] / second[pos]
    return out


def nndr(fake: np.ndarray, train: np.ndarray) -> NndrResult:
    """Nearest over second-nearest training distance per fake row, with mean and standard error."""
    f = _as_matrix(fake, "fake")
    t = _as_matrix(train, "train")
    _check_widths(f, t)
    if t.shape[0] < 2:
        raise ValueError(f"nndr needs at least 2 training rows, got {t.shape[0]}")
    if f.shape[0] == 0:
        raise ValueError("nndr needs at least one fake row")
    two = _reduce_rows(f, t, lambda d, _: np.sort(np.partition(d, 1, axis=1)[:, :2], axis=1), 2)
    values = _ratio(two[:, 0], two[:, 1])
    n = values.shape[0]
    sem = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return NndrResult(values, float(values.mean()), sem)


def histogram_range(values: np.ndarray) -> Tuple[float, float]:
    hi = float(np.max(values)) if len(values) else 0.0
    return 0.0, hi if hi > 0 else 1.0


def dcr_histogram(values: np.ndarray, bins: int = DCR_BINS) -> pd.DataFrame:
    """Uniform bins over [0, max]; columns bin_left, bin_right, count."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    v = np.asarray(values, dtype=np.float64).ravel()
    counts, edges = np.histogram(v, bins=bins, range=histogram_range(v))
    return pd.DataFrame(
        {"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts.astype(np.int64)}
    )


def write_dcr_histogram(hist: pd.DataFrame, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    hist.to_csv(p, index=False)
    return p
