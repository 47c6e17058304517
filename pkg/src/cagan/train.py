from __future__ import annotations

import logging
import math
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from autodiff import Adam, add, gradient_values, no_grad, scalar_mul
from data import Encoder, Table, fit_encoder, numeric_matrix
from discovery import PcConfig, discover
from graph import CausalGraph

from .config import TrainConfig
from .losses import (
    RewardResult,
    adversarial_loss,
    causal_surrogate_loss,
    discriminator_loss,
    structural_reward,
)
from .model import CaganModel, build, forward_fake, sample, sample_stochastic

logger = logging.getLogger("run")

RewardFn = Callable[[np.ndarray], RewardResult]

LOG_COLUMNS = [
    "epoch",
    "w_distance",
    "reward",
    "shd",
    "causal_loss",
    "critic_loss",
    "generator_loss",
    "seconds",
]


class TrainingAborted(RuntimeError):
    """A loss or gradient went non-finite; ``snapshot`` holds the state at the failing step.

    ``log`` carries the epochs completed before the failure.
    """

    def __init__(self, message: str, snapshot: Dict[str, float | int | str]) -> None:
        self.snapshot = dict(snapshot)
        self.log: List[EpochLog] = []
        detail = " ".join(f"{k}={v}" for k, v in sorted(self.snapshot.items()))
        super().__init__(f"{message} ({detail})")


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    w_distance: float
    reward: float
    shd: float
    causal_loss: float
    critic_loss: float
    generator_loss: float
    seconds: float


@dataclass
class TrainResult:
    model: CaganModel
    encoder: Encoder
    g_real: CausalGraph
    log: List[EpochLog] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)

    def log_frame(self) -> pd.DataFrame:
        return training_log_frame(self.log)


def training_log_frame(log: List[EpochLog]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in log], columns=LOG_COLUMNS)


def write_training_log(log: List[EpochLog], path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    training_log_frame(log).to_csv(p, index=False)
    return p


def _finite_or_abort(
    values: List[np.ndarray], what: str, snapshot: Dict[str, float | int | str]
) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise TrainingAborted(f"non-finite {what} gradient", snapshot)


def _nanmean(xs: List[float]) -> float:
    return float(np.mean(xs)) if xs else math.nan


def reference_graph(table: Table, pc_config: Optional[PcConfig] = None) -> CausalGraph:
    """G_real: PC run once on the training table."""
    res = discover(numeric_matrix(table), pc_config or PcConfig(), labels=table.schema.names)
    for f in res.flags:
        logger.warning("TRAIN GRAPH FLAG %s", f)
    return res.dag


def train(
    table: Table,
    config: TrainConfig,
    g_real: Optional[CausalGraph] = None,
    pc_config: Optional[PcConfig] = None,
    reward_fn: Optional[RewardFn] = None,
) -> TrainResult:
    """Alternate ``critic_steps`` critic updates with one generator update per step.

    The generator minimizes -mean D(fake) + lam * causal surrogate, where the surrogate weighs
    the log-likelihood of a fresh stochastic batch by the structural reward of that batch.
    With ``lam == 0`` no stochastic batch is drawn and no reward is computed.
    """
    if table.n_rows < 2:
        raise ValueError(f"training needs at least 2 rows, got {table.n_rows}")
    encoder = fit_encoder(table)
    x = encoder.encode(table)
    n = x.shape[0]
    if g_real is None:
        g_real = reference_graph(table, pc_config)
    elif g_real.n_nodes != table.n_columns:
        raise ValueError(
            f"reference graph has {g_real.n_nodes} nodes but table has {table.n_columns} columns"
        )

    init_ss, data_ss, critic_ss, gen_ss, reward_ss = np.random.SeedSequence(config.seed).spawn(5)
    model = build(g_real, table.schema, config, np.random.default_rng(init_ss))
    data_rng = np.random.default_rng(data_ss)
    critic_rng = np.random.default_rng(critic_ss)
    gen_rng = np.random.default_rng(gen_ss)
    reward_rng = np.random.default_rng(reward_ss)

    d_params = model.discriminator_parameters()
    g_params = model.generator_parameters()
    d_opt = Adam(d_params, config.adam())
    g_opt = Adam(g_params, config.adam())

    pc = config.reward_pc()
    reference = g_real

    def default_reward(values: np.ndarray) -> RewardResult:
        return structural_reward(reference, values, encoder, pc)

    score: RewardFn = reward_fn if reward_fn is not None else default_reward

    b = config.batch_size
    steps = config.steps_for(n)
    baseline: Optional[float] = None
    result = TrainResult(model, encoder, g_real)
    logger.info(
        "TRAIN START rows=%d width=%d nodes=%d edges=%d steps_per_epoch=%d lam=%s",
        n,
        encoder.width,
        g_real.n_nodes,
        g_real.n_edges,
        steps,
        config.lam,
    )

    pool = (
        ThreadPoolExecutor(max_workers=1, thread_name_prefix="reward")
        if config.async_reward
        else None
    )
    global_step = 0
    try:
        for epoch in range(1, config.epochs + 1):
            t0 = time.perf_counter()
            w_vals: List[float] = []
            c_vals: List[float] = []
            g_vals: List[float] = []
            rewards: List[float] = []
            shds: List[float] = []
            causal: List[float] = []
            for step in range(steps):
                snapshot: Dict[str, float | int | str] = {"epoch": epoch, "step": step}
                for _ in range(config.critic_steps):
                    real = x[data_rng.choice(n, size=b, replace=n < b)]
                    with no_grad():
                        fake = forward_fake(model, b, critic_rng, update_stats=False).values
                    loss = discriminator_loss(
                        model.discriminator, real, fake, config.gp_weight, critic_rng
                    )
                    snapshot.update(critic_loss=loss.total.item(), w_distance=loss.wasserstein)
                    if not math.isfinite(loss.total.item()):
                        raise TrainingAborted("non-finite critic loss", snapshot)
                    grads = gradient_values(loss.total, d_params)
                    _finite_or_abort(grads, "critic", snapshot)
                    d_opt.step(grads)
                    w_vals.append(loss.wasserstein)
                    c_vals.append(loss.total.item())

                use_reward = config.lam > 0 and global_step % config.reward_stride == 0
                stoch = None
                pending: Optional[Future[RewardResult]] = None
                reward: Optional[RewardResult] = None
                if use_reward:
                    stoch = sample_stochastic(model, b, reward_rng)
                    if pool is not None:
                        pending = pool.submit(score, stoch.values)
                    else:
                        reward = score(stoch.values)

                fake_t = forward_fake(model, b, gen_rng)
                total = adversarial_loss(model.discriminator, fake_t)
                adv_value = total.item()

                if stoch is not None:
                    if pending is not None:
                        reward = pending.result()
                    assert reward is not None
                    if reward.flagged:
                        result.flags.append(f"reward-pc-failed epoch={epoch} step={step}")
                    base = baseline if (config.reward_baseline and baseline is not None) else 0.0
                    surrogate = causal_surrogate_loss(stoch, reward.value, base)
                    weighted = scalar_mul(surrogate, config.lam)
                    total = add(total, weighted)
                    rewards.append(reward.value)
                    shds.append(reward.shd)
                    causal.append(weighted.item())
                    if config.reward_baseline:
                        d = config.baseline_decay
                        baseline = (
                            reward.value
                            if baseline is None
                            else d * baseline + (1.0 - d) * reward.value
                        )

                snapshot.update(generator_loss=total.item(), adversarial=adv_value)
                if not math.isfinite(total.item()):
                    raise TrainingAborted("non-finite generator loss", snapshot)
                grads = gradient_values(total, g_params, allow_unused=True)
                _finite_or_abort(grads, "generator", snapshot)
                g_opt.step(grads)
                g_vals.append(total.item())
                global_step += 1

            row = EpochLog(
                epoch=epoch,
                w_distance=_nanmean(w_vals),
                reward=_nanmean(rewards),
                shd=_nanmean(shds),
                causal_loss=float(np.mean(causal)) if causal else 0.0,
                critic_loss=_nanmean(c_vals),
                generator_loss=_nanmean(g_vals),
                seconds=time.perf_counter() - t0,
            )
            result.log.append(row)
            logger.info(
                "TRAIN EPOCH epoch=%d w=%.4f reward=%.3f shd=%.3f causal=%.5f seconds=%.2f",
                epoch,
                row.w_distance,
                row.reward,
                row.shd,
                row.causal_loss,
                row.seconds,
            )
    except TrainingAborted as exc:
        exc.log = list(result.log)
        logger.error("TRAIN ABORT epochs_done=%d %s", len(result.log), exc)
        raise
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    logger.info("TRAIN END epochs=%d flags=%d", len(result.log), len(result.flags))
    return result


def generate(model: CaganModel, encoder: Encoder, n: int, seed: int) -> Table:
    """n synthetic rows in the training schema."""
    if encoder.width != model.width:
        raise ValueError(f"encoder width {encoder.width} does not match model width {model.width}")
    return encoder.decode(sample(model, n, seed))
