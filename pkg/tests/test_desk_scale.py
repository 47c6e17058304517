from __future__ import annotations

from typing import Dict, List, Tuple

import numpy as np
import pytest

from cagan import TrainConfig, generate, train
from data import Table, split
from discovery import PcConfig
from evaluation import causal_shd_eval, downstream_f1, evaluate_tables
from graph import CausalGraph
from simulate import make_benchmark

pytestmark = pytest.mark.slow

SEEDS = (1, 2, 3)


def _rows(name: str, n: int, seed: int) -> Tuple[Table, CausalGraph]:
    table, truth = make_benchmark(name, seed=seed)
    return table.take(np.arange(n)), truth


def _fit_and_sample(table: Table, truth: CausalGraph, cfg: TrainConfig) -> Table:
    res = train(table, cfg, g_real=truth)
    return generate(res.model, res.encoder, table.n_rows, seed=cfg.seed)


def test_causal_term_does_not_worsen_structure() -> None:
    pc = PcConfig(alpha=0.05, max_depth=3)
    shd: Dict[float, List[int]] = {0.01: [], 0.0: []}
    floors: List[int] = []
    for seed in SEEDS:
        table, truth = _rows("4nodes_10k", 2000, seed)
        floors.append(causal_shd_eval(truth, table, pc))
        for lam in shd:
            cfg = TrainConfig(batch_size=250, epochs=100, lam=lam, seed=seed)
            shd[lam].append(causal_shd_eval(truth, _fit_and_sample(table, truth, cfg), pc))
    with_term, without = float(np.mean(shd[0.01])), float(np.mean(shd[0.0]))
    floor = float(np.mean(floors))
    assert with_term <= without or with_term == without == floor


def test_synthetic_training_data_keeps_most_utility() -> None:
    real_f1: List[float] = []
    fake_f1: List[float] = []
    for seed in SEEDS:
        table, truth = _rows("5nodes_mixed_10k", 3000, seed)
        tr, te = split(table, 0.8, seed=seed, target="X3")
        fake = _fit_and_sample(tr, truth, TrainConfig(batch_size=250, epochs=100, seed=seed))
        real_f1.append(downstream_f1(tr, te, "X3").score)
        fake_f1.append(downstream_f1(fake, te, "X3").score)
    assert np.mean(fake_f1) >= 0.8 * np.mean(real_f1)


def test_generated_rows_are_not_copies() -> None:
    table, truth = _rows("5nodes_mixed_10k", 2000, 1)
    fake = _fit_and_sample(table, truth, TrainConfig(batch_size=250, epochs=50, seed=1))
    bootstrap = table.take(np.random.default_rng(0).integers(0, table.n_rows, size=table.n_rows))

    generated = evaluate_tables(table, fake)
    memorized = evaluate_tables(table, bootstrap)
    assert generated.reid_risk is not None and memorized.reid_risk is not None
    assert generated.reid_risk < memorized.reid_risk
    assert min(generated.dcr) > 0.0
