from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from .tensor import Tensor, add, matmul, mul, parameter, reciprocal, reduce_mean, sqrt, square, sub

INIT_STD = 0.02
BN_EPS = 1e-5


def batch_norm(
    x: Tensor, mean: Tensor, var: Tensor, gamma: Tensor, beta: Tensor, eps: float = BN_EPS
) -> Tensor:
    """gamma * (x - mean) / sqrt(var + eps) + beta with per-column statistics (1 x m)."""
    scale = reciprocal(sqrt(add(var, eps)))
    return add(mul(mul(sub(x, mean), scale), gamma), beta)


class Linear:
    """Affine layer x @ W + b with W ~ N(0, 0.02^2) and b = 0."""

    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator, name: str) -> None:
        if n_in < 1 or n_out < 1:
            raise ValueError(f"{name}: layer widths must be >= 1, got {n_in}x{n_out}")
        self.weight = parameter(
            rng.normal(0.0, INIT_STD, size=(n_in, n_out)), name=f"{name}.weight"
        )
        self.bias = parameter(np.zeros((1, n_out)), name=f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return add(matmul(x, self.weight), self.bias)

    def parameters(self) -> List[Tensor]:
        return [self.weight, self.bias]


@dataclass
class RunningStats:
    mean: np.ndarray
    var: np.ndarray


class BatchNorm:
    """Batch normalization with Keras-style momentum: running = m * running + (1 - m) * batch."""

    def __init__(self, width: int, name: str, momentum: float = 0.8, eps: float = BN_EPS) -> None:
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"{name}: momentum must be in [0, 1), got {momentum}")
        self.name = name
        self.momentum = float(momentum)
        self.eps = float(eps)
        self.gamma = parameter(np.ones((1, width)), name=f"{name}.gamma")
        self.beta = parameter(np.zeros((1, width)), name=f"{name}.beta")
        self.running = RunningStats(mean=np.zeros((1, width)), var=np.ones((1, width)))

    def __call__(self, x: Tensor, training: bool, update_stats: bool = True) -> Tensor:
        if not training:
            return batch_norm(
                x,
                Tensor(self.running.mean),
                Tensor(self.running.var),
                self.gamma,
                self.beta,
                self.eps,
            )
        if x.shape[0] == 0:
            raise ValueError(f"{self.name}: batch statistics need at least one row")
        mean = reduce_mean(x, axis=0)
        var = reduce_mean(square(sub(x, mean)), axis=0)
        if update_stats:
            m = self.momentum
            self.running = RunningStats(
                mean=m * self.running.mean + (1.0 - m) * mean.values,
                var=m * self.running.var + (1.0 - m) * var.values,
            )
        return batch_norm(x, mean, var, self.gamma, self.beta, self.eps)

    def parameters(self) -> List[Tensor]:
        return [self.gamma, self.beta]

    def stats_dict(self) -> Dict[str, list]:
        return {"mean": self.running.mean.tolist(), "var": self.running.var.tolist()}

    def load_stats(self, data: Dict[str, list]) -> None:
        mean = np.array(data["mean"], dtype=np.float64).reshape(self.gamma.shape)
        var = np.array(data["var"], dtype=np.float64).reshape(self.gamma.shape)
        self.running = RunningStats(mean=mean, var=var)
