from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from data import ColumnSpec, Table, TableSchema
from discovery import PcConfig
from evaluation import (
    EvalReport,
    causal_shd_eval,
    config_hash,
    dcr,
    dcr_histogram,
    downstream_f1,
    evaluate_tables,
    f1_score,
    nndr,
    reid_weights,
    reidentification_risk,
    write_dcr_histogram,
)
from graph import CausalGraph
from simulate import make_benchmark


def _brute_min(query: np.ndarray, ref: np.ndarray) -> np.ndarray:
    return np.array([min(np.sqrt(np.sum((q - r) ** 2)) for r in ref) for q in query])


def _brute_reid(real: np.ndarray, fake: np.ndarray, w: np.ndarray) -> float:
    hits = 0
    for i, x in enumerate(real):
        r_hat = min(np.sqrt(np.sum((w * (x - f)) ** 2)) for f in fake)
        r = min(np.sqrt(np.sum((w * (x - y)) ** 2)) for k, y in enumerate(real) if k != i)
        hits += r_hat < r
    return hits / len(real)


def _brute_nndr(fake: np.ndarray, train: np.ndarray) -> np.ndarray:
    out = []
    for q in fake:
        d = sorted(np.sqrt(np.sum((q - r) ** 2)) for r in train)
        if d[1] == 0:
            out.append(1.0)
        elif d[0] == 0:
            out.append(0.0)
        else:
            out.append(d[0] / d[1])
    return np.array(out)


def test_dcr_examples() -> None:
    x = np.random.default_rng(0).normal(size=(20, 3))
    np.testing.assert_array_equal(dcr(x, x), 0.0)
    assert dcr(np.array([[4.0]]), np.array([[0.0], [10.0]]))[0] == pytest.approx(4.0)


def test_dcr_matches_brute_force() -> None:
    rng = np.random.default_rng(1)
    fake, train = rng.normal(size=(50, 4)), rng.normal(size=(50, 4))
    np.testing.assert_allclose(dcr(fake, train), _brute_min(fake, train), rtol=1e-12, atol=1e-12)


def test_dcr_errors() -> None:
    with pytest.raises(ValueError, match="training row"):
        dcr(np.zeros((3, 2)), np.zeros((0, 2)))
    with pytest.raises(ValueError, match="widths"):
        dcr(np.zeros((3, 2)), np.zeros((3, 3)))


def test_reid_copy_is_full_risk() -> None:
    real = np.random.default_rng(2).normal(size=(30, 3))
    assert reidentification_risk(real, real.copy()) == 1.0


def test_reid_far_fake_is_no_risk() -> None:
    real = np.arange(10, dtype=np.float64).reshape(-1, 1)
    fake = real + 100.0
    assert reidentification_risk(real, fake, weights=np.ones(1)) == 0.0


def test_reid_matches_brute_force() -> None:
    rng = np.random.default_rng(3)
    real, fake = rng.normal(size=(30, 3)), rng.normal(size=(30, 3))
    w = reid_weights(real)
    assert reidentification_risk(real, fake) == _brute_reid(real, fake, w)


def test_reid_weights_and_errors() -> None:
    real = np.array([[0.0, 1.0], [2.0, 1.0], [4.0, 1.0]])
    w = reid_weights(real)
    assert w[1] == 0.0
    assert w[0] == pytest.approx(1.0 / real[:, 0].std())
    with pytest.raises(ValueError, match="at least 2 real"):
        reidentification_risk(real[:1], real)
    with pytest.raises(ValueError, match="fake row"):
        reidentification_risk(real, np.zeros((0, 2)))


def test_nndr_examples() -> None:
    train = np.array([[0.0], [2.0], [10.0]])
    res = nndr(np.array([[1.0], [0.0]]), train)
    np.testing.assert_allclose(res.values, [1.0, 0.0])
    assert res.mean == pytest.approx(0.5)
    dup = np.array([[0.0], [0.0], [5.0]])
    assert nndr(np.array([[0.0]]), dup).values[0] == 1.0


def test_nndr_matches_brute_force() -> None:
    rng = np.random.default_rng(4)
    fake, train = rng.normal(size=(50, 3)), rng.normal(size=(50, 3))
    res = nndr(fake, train)
    np.testing.assert_allclose(res.values, _brute_nndr(fake, train), rtol=0, atol=1e-12)
    assert np.all((res.values >= 0) & (res.values <= 1))
    assert res.sem == pytest.approx(res.values.std(ddof=1) / math.sqrt(50))


def test_nndr_needs_two_train_rows() -> None:
    with pytest.raises(ValueError, match="2 training rows"):
        nndr(np.zeros((2, 1)), np.zeros((1, 1)))


def test_metrics_ignore_row_order() -> None:
    rng = np.random.default_rng(5)
    real, fake = rng.normal(size=(40, 2)), rng.normal(size=(40, 2))
    pr, pf = rng.permutation(40), rng.permutation(40)
    assert reidentification_risk(real[pr], fake[pf]) == reidentification_risk(real, fake)
    np.testing.assert_allclose(np.sort(dcr(fake[pf], real[pr])), np.sort(dcr(fake, real)))
    assert nndr(fake[pf], real[pr]).mean == pytest.approx(nndr(fake, real).mean, abs=1e-12)


def test_dcr_histogram(tmp_path: Path) -> None:
    values = np.linspace(0.0, 4.0, 81)
    hist = dcr_histogram(values)
    assert len(hist) == 40
    assert hist["bin_left"].iloc[0] == 0.0
    assert hist["bin_right"].iloc[-1] == pytest.approx(4.0)
    assert hist["count"].sum() == 81
    p = write_dcr_histogram(hist, tmp_path / "dcr_hist.csv")
    assert list(pd.read_csv(p).columns) == ["bin_left", "bin_right", "count"]
    zeros = dcr_histogram(np.zeros(5))
    assert zeros["count"].iloc[0] == 5


def test_f1_score() -> None:
    y = ["a", "b"] * 50
    assert f1_score(y, ["b"] * 100, positive="b") == pytest.approx(2.0 / 3.0)
    assert f1_score(y, y, positive="b") == 1.0
    assert f1_score(["a", "a"], ["a", "a"], positive="b") == 0.0
    macro = f1_score(["a", "b", "c"], ["a", "b", "b"], average="macro")
    assert macro == pytest.approx((1.0 + 2.0 / 3.0 + 0.0) / 3)
    with pytest.raises(ValueError):
        f1_score(["a"], ["a"], average="binary")


def _separable(n: int, seed: int) -> Table:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, size=(n, 2))
    label = np.where(x[:, 0] + x[:, 1] > 0, "yes", "no")
    # keep a margin so the classes are linearly separable
    keep = np.abs(x[:, 0] + x[:, 1]) > 0.1
    schema = TableSchema(
        (
            ColumnSpec("u", "continuous"),
            ColumnSpec("v", "continuous"),
            ColumnSpec("y", "categorical", ("no", "yes")),
        )
    )
    return Table.from_columns(schema, {"u": x[keep, 0], "v": x[keep, 1], "y": label[keep]})


def test_downstream_f1_separable() -> None:
    res = downstream_f1(_separable(400, 0), _separable(400, 1), "y")
    assert res.average == "binary"
    assert res.positive == "yes"
    assert res.score >= 0.95
    assert res.flags == ()


def test_downstream_f1_single_class_test_is_flagged() -> None:
    test = _separable(200, 2)
    only_yes = test.take(np.flatnonzero(test.frame["y"].to_numpy() == "yes"))
    res = downstream_f1(_separable(200, 3), only_yes, "y")
    assert "single-class-test-labels" in res.flags
    assert 0.0 <= res.score <= 1.0


def test_downstream_f1_errors() -> None:
    t = _separable(50, 4)
    with pytest.raises(ValueError, match="not in test"):
        downstream_f1(t, t, "missing")
    with pytest.raises(ValueError, match="categorical"):
        downstream_f1(t, t, "u")


def test_causal_shd_on_true_data() -> None:
    table, truth = make_benchmark("4nodes_10k", seed=0)
    assert causal_shd_eval(truth, table) <= 2
    assert causal_shd_eval(truth, table) == causal_shd_eval(truth, table)


def test_causal_shd_on_noise_counts_true_edges() -> None:
    truth = CausalGraph(3, frozenset({(0, 1), (1, 2)}))
    rng = np.random.default_rng(6)
    schema = TableSchema(tuple(ColumnSpec(n, "continuous") for n in ("a", "b", "c")))
    noise = Table.from_columns(schema, {n: rng.normal(size=5000) for n in ("a", "b", "c")})
    assert causal_shd_eval(truth, noise, PcConfig(alpha=1e-4)) == 2


def _mixed(n: int, seed: int) -> Table:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n)
    schema = TableSchema(
        (
            ColumnSpec("a", "continuous"),
            ColumnSpec("b", "continuous"),
            ColumnSpec("k", "categorical", ("x", "y")),
        )
    )
    b = a + rng.normal(size=n)
    return Table.from_columns(schema, {"a": a, "b": b, "k": np.where(a > 0, "y", "x")})


def test_evaluate_tables_copy(tmp_path: Path) -> None:
    real = _mixed(120, 7)
    truth = CausalGraph(3, frozenset({(0, 1), (0, 2)}))
    report = evaluate_tables(
        real, real, truth=truth, target="k", dataset="toy", seeds=(1,), hash_of_config="abc"
    )
    assert report.reid_risk == 1.0
    assert report.shd is not None
    assert report.f1 is not None
    assert report.dcr_mean == 0.0
    assert set(report.metrics) == {"shd", "f1", "dcr", "reid_risk", "nndr"}
    p = report.to_json(tmp_path / "report.json")
    assert EvalReport.from_json(p) == report
    assert report.histogram_frame()["count"].sum() == 120


def test_evaluate_tables_privacy_only() -> None:
    real, fake = _mixed(80, 8), _mixed(60, 9)
    report = evaluate_tables(real, fake)
    assert report.shd is None and report.f1 is None
    assert 0.0 <= report.reid_risk <= 1.0
    assert len(report.nndr) == 60


def test_evaluate_tables_with_nothing_computable() -> None:
    real = _mixed(10, 10)
    with pytest.raises(ValueError, match="no metric"):
        evaluate_tables(real, real.take([]))


def test_report_validation_and_hash() -> None:
    with pytest.raises(ValueError):
        EvalReport(reid_risk=1.5)
    with pytest.raises(ValueError):
        EvalReport(nndr=(0.2, 1.2))
    with pytest.raises(ValueError):
        EvalReport(f1=math.nan)
    a = config_hash({"b": 1, "a": [1, 2]})
    assert a == config_hash({"a": [1, 2], "b": 1})
    assert len(a) == 64
    assert a != config_hash({"a": [1, 2], "b": 2})
