from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from autodiff import (
    BatchNorm,
    Linear,
    Tensor,
    add,
    concat,
    constant,
    leaky_relu,
    log_softmax,
    mul,
    no_grad,
    reduce_sum,
    scalar_mul,
    softmax,
    square,
    sub,
    tanh,
)
from core.types import HeadKind
from data import TableSchema
from graph import CausalGraph, topological_order

from .config import TrainConfig

LRELU_SLOPE = 0.2
HIDDEN = (64, 128, 128)
CRITIC_HIDDEN = 256
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class SubGenerator:
    """Four-layer MLP producing one node from its encoded parents and its own noise.

    in -> 64 -> 128 (BN) -> 128 (BN) -> out, leaky-relu 0.2 between layers. The tanh head
    emits one value in [-1, 1]; the gumbel head emits K logits.
    """

    def __init__(
        self,
        node: int,
        parents: Sequence[int],
        parent_width: int,
        out_width: int,
        head: HeadKind,
        noise_dim: int,
        rng: np.random.Generator,
        momentum: float = 0.8,
    ) -> None:
        self.node = node
        self.parents = tuple(sorted(parents))
        self.noise_dim = noise_dim
        self.in_width = parent_width + noise_dim
        self.out_width = out_width
        self.head = head
        h1, h2, h3 = HIDDEN
        tag = f"G{node}"
        self.l1 = Linear(self.in_width, h1, rng, f"{tag}.l1")
        self.l2 = Linear(h1, h2, rng, f"{tag}.l2")
        self.bn2 = BatchNorm(h2, f"{tag}.bn2", momentum=momentum)
        self.l3 = Linear(h2, h3, rng, f"{tag}.l3")
        self.bn3 = BatchNorm(h3, f"{tag}.bn3", momentum=momentum)
        self.l4 = Linear(h3, out_width, rng, f"{tag}.l4")

    def pre_head(self, x: Tensor, training: bool, update_stats: bool = True) -> Tensor:
        h = leaky_relu(self.l1(x), LRELU_SLOPE)
        h = leaky_relu(self.bn2(self.l2(h), training, update_stats), LRELU_SLOPE)
        h = leaky_relu(self.bn3(self.l3(h), training, update_stats), LRELU_SLOPE)
        return self.l4(h)

    def parameters(self) -> List[Tensor]:
        out: List[Tensor] = []
        for layer in (self.l1, self.l2, self.bn2, self.l3, self.bn3, self.l4):
            out.extend(layer.parameters())
        return out

    def batch_norms(self) -> List[BatchNorm]:
        return [self.bn2, self.bn3]


class Discriminator:
    """Critic: in -> 256 -> 256 -> 1 with leaky-relu 0.2 and no normalization layers."""

    def __init__(self, in_width: int, rng: np.random.Generator) -> None:
        self.in_width = in_width
        self.l1 = Linear(in_width, CRITIC_HIDDEN, rng, "D.l1")
        self.l2 = Linear(CRITIC_HIDDEN, CRITIC_HIDDEN, rng, "D.l2")
        self.l3 = Linear(CRITIC_HIDDEN, 1, rng, "D.l3")

    def __call__(self, x: Tensor) -> Tensor:
        h = leaky_relu(self.l1(x), LRELU_SLOPE)
        h = leaky_relu(self.l2(h), LRELU_SLOPE)
        return self.l3(h)

    def parameters(self) -> List[Tensor]:
        return [*self.l1.parameters(), *self.l2.parameters(), *self.l3.parameters()]


@dataclass
class CaganModel:
    graph: CausalGraph
    schema: TableSchema
    generators: List[SubGenerator]
    discriminator: Discriminator
    order: Tuple[int, ...]
    noise_dim: int
    tau: float
    policy_std: float = 1.0

    @property
    def width(self) -> int:
        return self.schema.encoded_width

    def offsets(self) -> List[int]:
        out, pos = [], 0
        for col in self.schema.columns:
            out.append(pos)
            pos += col.encoded_width
        return out

    def generator_parameters(self) -> List[Tensor]:
        return [p for g in self.generators for p in g.parameters()]

    def discriminator_parameters(self) -> List[Tensor]:
        return self.discriminator.parameters()


@dataclass
class StochasticSample:
    """Encoded batch drawn from the generator policy plus its log-likelihood on the tape.

    ``log_prob`` is the n x 1 sum of the per-node terms in ``node_log_probs``.
    """

    values: np.ndarray
    log_prob: Tensor
    node_log_probs: Dict[int, Tensor]
    means: Dict[int, Tensor]


def build(
    graph: CausalGraph,
    schema: TableSchema,
    config: TrainConfig,
    rng: Optional[np.random.Generator] = None,
) -> CaganModel:
    if graph.n_nodes != schema.n_columns:
        raise ValueError(
            f"graph has {graph.n_nodes} nodes but schema has {schema.n_columns} columns"
        )
    order = tuple(topological_order(graph))
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    gens: List[SubGenerator] = []
    for j, col in enumerate(schema.columns):
        pa = sorted(graph.parents(j))
        pw = sum(schema.columns[p].encoded_width for p in pa)
        head: HeadKind = "gumbel" if col.is_categorical else "tanh"
        gens.append(
            SubGenerator(
                j, pa, pw, col.encoded_width, head, config.noise_dim, rng, config.bn_momentum
            )
        )
    disc = Discriminator(schema.encoded_width, rng)
    return CaganModel(
        graph, schema, gens, disc, order, config.noise_dim, config.tau, config.policy_std
    )


def _generator_input(gen: SubGenerator, blocks: Dict[int, Tensor], z: np.ndarray) -> Tensor:
    parts = [blocks[p] for p in gen.parents]
    parts.append(constant(z))
    return concat(parts, axis=1)


def _gumbel(rng: np.random.Generator, shape: Tuple[int, int]) -> np.ndarray:
    u = rng.uniform(np.finfo(np.float64).tiny, 1.0, size=shape)
    return -np.log(-np.log(u))


def _one_hot(codes: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((codes.shape[0], k))
    out[np.arange(codes.shape[0]), codes] = 1.0
    return out


def _check_finite(t: Tensor, node: int) -> None:
    if not np.all(np.isfinite(t.values)):
        raise ValueError(f"node {node}: generator produced non-finite outputs")


def forward_fake(
    model: CaganModel, n: int, rng: np.random.Generator, update_stats: bool = True
) -> Tensor:
    """Differentiable fake batch: tanh values and soft Gumbel-Softmax one-hots.

    Uses batch statistics; ``update_stats`` decides whether running estimates move.
    """
    blocks: Dict[int, Tensor] = {}
    for j in model.order:
        gen = model.generators[j]
        z = rng.normal(size=(n, model.noise_dim))
        x_in = _generator_input(gen, blocks, z)
        pre = gen.pre_head(x_in, training=True, update_stats=update_stats)
        _check_finite(pre, j)
        if gen.head == "tanh":
            blocks[j] = tanh(pre)
        else:
            g = _gumbel(rng, pre.shape)
            blocks[j] = softmax(scalar_mul(add(pre, constant(g)), 1.0 / model.tau))
    return concat([blocks[j] for j in range(len(model.generators))], axis=1)


def sample(model: CaganModel, n: int, seed: int | np.random.Generator) -> np.ndarray:
    """Deterministic-mode ancestral sampling: running BN statistics, hard one-hot categories."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return np.zeros((0, model.width))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    blocks: Dict[int, Tensor] = {}
    with no_grad():
        for j in model.order:
            gen = model.generators[j]
            z = rng.normal(size=(n, model.noise_dim))
            pre = gen.pre_head(_generator_input(gen, blocks, z), training=False)
            _check_finite(pre, j)
            if gen.head == "tanh":
                blocks[j] = constant(np.tanh(pre.values))
            else:
                # argmax of the perturbed logits is the hardened Gumbel-Softmax sample at any tau
                codes = np.argmax(pre.values + _gumbel(rng, pre.shape), axis=1)
                blocks[j] = constant(_one_hot(codes, gen.out_width))
    return np.concatenate([blocks[j].values for j in range(len(model.generators))], axis=1)


def sample_stochastic(model: CaganModel, n: int, rng: np.random.Generator) -> StochasticSample:
    """Draw x ~ p_theta with per-row log-likelihood kept on the tape.

    Continuous node: a ~ N(mu, s^2) with mu the tanh output; categorical node: c ~ softmax(logits).
    Children consume the drawn values (hard one-hot for categories) as constants. Batch
    statistics are used without touching the running estimates.
    """
    if n < 1:
        raise ValueError(f"stochastic sampling needs n >= 1, got {n}")
    s = model.policy_std
    blocks: Dict[int, Tensor] = {}
    node_lp: Dict[int, Tensor] = {}
    means: Dict[int, Tensor] = {}
    for j in model.order:
        gen = model.generators[j]
        z = rng.normal(size=(n, model.noise_dim))
        pre = gen.pre_head(_generator_input(gen, blocks, z), training=True, update_stats=False)
        if not np.all(np.isfinite(pre.values)):
            raise ValueError(f"node {j}: non-finite logits")
        if gen.head == "tanh":
            mu = tanh(pre)
            a = mu.values + s * rng.normal(size=mu.shape)
            resid = sub(constant(a), mu)
            node_lp[j] = add(
                scalar_mul(square(resid), -0.5 / (s * s)), -(LOG_SQRT_2PI + math.log(s))
            )
            means[j] = mu
            blocks[j] = constant(a)
        else:
            probs = np.exp(log_softmax(constant(pre.values)).values)
            u = rng.random(n)
            below = (u[:, None] >= np.cumsum(probs, axis=1)).sum(axis=1)
            codes = np.minimum(below, gen.out_width - 1)
            hot = _one_hot(codes, gen.out_width)
            node_lp[j] = reduce_sum(mul(log_softmax(pre), constant(hot)), axis=1)
            blocks[j] = constant(hot)
    total = node_lp[model.order[0]]
    for j in model.order[1:]:
        total = add(total, node_lp[j])
    values = np.concatenate([blocks[j].values for j in range(len(model.generators))], axis=1)
    return StochasticSample(values, total, node_lp, means)
