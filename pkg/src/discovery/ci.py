from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

# condition number above which a correlation submatrix counts as singular
SINGULAR_COND = 1e12


@dataclass(frozen=True)
class PcConfig:
    """PC search settings: test level, deepest conditioning set, correlation clamp."""

    alpha: float = 0.05
    max_depth: int = 3
    rho_clamp: float = 0.999999

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 0:
            raise ValueError(f"max_depth must be an integer >= 0, got {self.max_depth}")
        if not 0.0 < self.rho_clamp < 1.0:
            raise ValueError(f"rho_clamp must be in (0, 1), got {self.rho_clamp}")

    def with_depth(self, depth: int) -> PcConfig:
        return PcConfig(alpha=self.alpha, max_depth=depth, rho_clamp=self.rho_clamp)

    @classmethod
    def from_mapping(cls, raw: Optional[Mapping[str, Any]]) -> PcConfig:
        raw = dict(raw or {})
        unknown = set(raw) - {"alpha", "max_depth", "rho_clamp"}
        if unknown:
            raise ValueError(f"unknown pc settings: {sorted(unknown)}")
        base = cls()
        return cls(
            alpha=float(raw.get("alpha", base.alpha)),
            max_depth=int(raw.get("max_depth", base.max_depth)),
            rho_clamp=float(raw.get("rho_clamp", base.rho_clamp)),
        )

    def to_dict(self) -> Dict[str, float | int]:
        return {"alpha": self.alpha, "max_depth": self.max_depth, "rho_clamp": self.rho_clamp}


@dataclass(frozen=True)
class CiTestResult:
    i: int
    j: int
    cond: Tuple[int, ...]
    statistic: float
    p_value: float
    independent: bool
    singular: bool = False


def correlation_matrix(data: np.ndarray) -> np.ndarray:
    """Pearson correlations of the columns; entries involving a constant column are NaN."""
    x = np.asarray(data, dtype=np.float64)
    centered = x - x.mean(axis=0, keepdims=True)
    sd = np.sqrt((centered**2).sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = centered / sd
        corr = z.T @ z
    corr[:, sd == 0] = np.nan
    corr[sd == 0, :] = np.nan
    return corr


def fisher_z_from_corr(
    corr: np.ndarray,
    n: int,
    i: int,
    j: int,
    cond: Sequence[int],
    alpha: float,
    rho_clamp: float = 0.999999,
) -> CiTestResult:
    cond_t = tuple(int(c) for c in cond)
    if n <= len(cond_t) + 3:
        raise ValueError(f"fisher-z needs n > |cond| + 3, got n={n} |cond|={len(cond_t)}")
    idx = [i, j, *cond_t]
    sub = corr[np.ix_(idx, idx)]
    if not np.all(np.isfinite(sub)) or np.linalg.cond(sub) > SINGULAR_COND:
        return CiTestResult(i, j, cond_t, math.inf, 0.0, False, singular=True)
    prec = np.linalg.inv(sub)
    denom = math.sqrt(prec[0, 0] * prec[1, 1])
    rho = -prec[0, 1] / denom if denom > 0 else 0.0
    rho = float(np.clip(rho, -rho_clamp, rho_clamp))
    z = 0.5 * math.log((1.0 + rho) / (1.0 - rho))
    stat = math.sqrt(n - len(cond_t) - 3) * abs(z)
    p = float(min(1.0, max(0.0, 2.0 * norm.sf(stat))))
    return CiTestResult(i, j, cond_t, float(stat), p, p > alpha)


def fisher_z_test(
    data: np.ndarray,
    i: int,
    j: int,
    cond: Sequence[int],
    alpha: float,
    rho_clamp: float = 0.999999,
) -> CiTestResult:
    """Fisher-z partial-correlation test of column i independent of column j given ``cond``.

    A singular (or undefined) correlation submatrix is reported as dependent with
    ``singular=True``.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"data must be a 2-D matrix, got ndim={x.ndim}")
    m = x.shape[1]
    for v in (i, j, *cond):
        if not 0 <= v < m:
            raise ValueError(f"column {v} out of range for {m} columns")
    if i == j or i in cond or j in cond:
        raise ValueError(
            "test variables must be distinct and outside the conditioning set: "
            f"{i}, {j} | {tuple(cond)}"
        )
    return fisher_z_from_corr(correlation_matrix(x), x.shape[0], i, j, cond, alpha, rho_clamp)
