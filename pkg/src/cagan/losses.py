from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from autodiff import (
    Tensor,
    add,
    constant,
    gradient,
    mul,
    parameter,
    reduce_mean,
    reduce_sum,
    row_norm,
    scalar_mul,
    square,
    sub,
)
from data import Encoder, numeric_matrix
from discovery import PcConfig, discover
from graph import CausalGraph, shd

from .model import Discriminator, StochasticSample

logger = logging.getLogger("run")


@dataclass
class CriticLoss:
    total: Tensor
    wasserstein: float
    penalty: float


@dataclass(frozen=True)
class RewardResult:
    value: float
    shd: float
    graph: Optional[CausalGraph]
    flagged: bool = False


def _as_tensor(x: Tensor | np.ndarray) -> Tensor:
    return x if isinstance(x, Tensor) else constant(x)


def gradient_penalty(
    disc: Discriminator, real: np.ndarray, fake: np.ndarray, rng: np.random.Generator
) -> Tensor:
    """mean over rows of (||grad_x D(x_tilde)||_2 - 1)^2 on random interpolates.

    Kept differentiable so the critic step can backpropagate through it.
    """
    eps = rng.uniform(0.0, 1.0, size=(real.shape[0], 1))
    x_tilde = parameter(eps * real + (1.0 - eps) * fake, name="x_tilde")
    scores = disc(x_tilde)
    (g,) = gradient(reduce_sum(scores), [x_tilde], create_graph=True, allow_unused=True)
    return reduce_mean(square(sub(row_norm(g), 1.0)))


def discriminator_loss(
    disc: Discriminator,
    real: Tensor | np.ndarray,
    fake: Tensor | np.ndarray,
    gp_weight: float,
    rng: np.random.Generator,
) -> CriticLoss:
    """-mean D(real) + mean D(fake) + gp_weight * gradient penalty."""
    r = _as_tensor(real).values
    f = _as_tensor(fake).values
    if r.shape[1] != f.shape[1]:
        raise ValueError(f"real and fake batch widths differ: {r.shape[1]} vs {f.shape[1]}")
    w_term = sub(reduce_mean(disc(constant(f))), reduce_mean(disc(constant(r))))
    total = w_term
    pen_value = 0.0
    if gp_weight > 0:
        pen = gradient_penalty(disc, r, f, rng)
        pen_value = pen.item()
        total = add(w_term, scalar_mul(pen, gp_weight))
    return CriticLoss(total, -w_term.item(), pen_value)


def adversarial_loss(disc: Discriminator, fake: Tensor) -> Tensor:
    return scalar_mul(reduce_mean(disc(fake)), -1.0)


def worst_reward(n_nodes: int) -> float:
    return -n_nodes * (n_nodes - 1) / 2.0


def structural_reward(
    g_real: CausalGraph,
    fake_values: np.ndarray,
    encoder: Encoder,
    pc_config: PcConfig,
) -> RewardResult:
    """Negative SHD between the reference graph and the graph PC recovers from a fake batch.

    Returns a plain float. Any failure decoding or searching the batch gives the worst
    possible reward -M(M-1)/2 with ``flagged`` set.
    """
    m = g_real.n_nodes
    try:
        table = encoder.decode(np.asarray(fake_values, dtype=np.float64))
        found = discover(numeric_matrix(table), pc_config, labels=g_real.labels)
        dist = shd(g_real, found.dag)
    except (ValueError, np.linalg.LinAlgError) as exc:
        logger.warning("REWARD FLAG pc-failed error=%s", exc)
        worst = worst_reward(m)
        return RewardResult(worst, -worst, None, flagged=True)
    return RewardResult(-float(dist), float(dist), found.dag)


def causal_surrogate_loss(
    sample: StochasticSample, reward: float | np.ndarray, baseline: float = 0.0
) -> Tensor:
    """-mean((reward - baseline) * log p(x)); its gradient is the score-function estimator.

    ``reward`` is one number for the whole batch, or one per row (n x 1) for
    per-sample returns.
    """
    if np.ndim(reward) == 0:
        advantage = float(reward) - float(baseline)  # type: ignore[arg-type]
        return scalar_mul(reduce_mean(sample.log_prob), -advantage)
    r = np.asarray(reward, dtype=np.float64).reshape(-1, 1)
    if r.shape[0] != sample.log_prob.shape[0]:
        raise ValueError(
            f"per-row rewards need {sample.log_prob.shape[0]} entries, got {r.shape[0]}"
        )
    return scalar_mul(reduce_mean(mul(sample.log_prob, constant(r - baseline))), -1.0)
