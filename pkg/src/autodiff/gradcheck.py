from __future__ import annotations

from typing import Callable, List, Sequence

import numpy as np

from .tensor import Tensor, gradient_values

FD_STEP = 1e-5


def numeric_gradient(
    fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = FD_STEP
) -> List[np.ndarray]:
    """Central finite differences of the scalar ``fn()`` w.r.t. each tensor's entries.

    ``fn`` must read the tensors' current values; entries are perturbed in place and restored.
    Recording stays enabled so ``fn`` may itself take gradients (gradient-penalty checks).
    """
    out: List[np.ndarray] = []
    for t in tensors:
        g = np.zeros_like(t.values)
        for idx in np.ndindex(*t.values.shape):
            orig = t.values[idx]
            t.values[idx] = orig + h
            f_plus = fn().item()
            t.values[idx] = orig - h
            f_minus = fn().item()
            t.values[idx] = orig
            g[idx] = (f_plus - f_minus) / (2.0 * h)
        out.append(g)
    return out


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-4) -> float:
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    if a.shape != n.shape:
        raise ValueError(f"gradient shapes differ: {a.shape} vs {n.shape}")
    if not a.size:
        return 0.0
    scale = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float(np.max(np.abs(a - n) / scale))


def check_gradients(
    fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = FD_STEP
) -> float:
    """Worst relative error between reverse-mode and finite-difference gradients."""
    analytic = gradient_values(fn(), list(tensors), allow_unused=True)
    numeric = numeric_gradient(fn, tensors, h=h)
    return max(max_relative_error(a, n) for a, n in zip(analytic, numeric))
