from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import pytest

from pipeline import (
    BenchConfig,
    RunConfig,
    UsageError,
    dataset_label,
    is_csv_dataset,
    load_run_config,
    load_scm_file,
    write_config_echo,
)

ROOT = Path(__file__).resolve().parents[1]


def write_yaml(path: Path, content: str) -> None:
    path.write_text(content, encoding="utf-8")


def test_defaults_without_file() -> None:
    cfg = load_run_config(None)
    assert cfg == RunConfig()
    assert cfg.train.lam == 0.01
    assert cfg.bench.seeds == (1, 2, 3)
    assert cfg.bench.lambdas == (0.01, 0.0)


def test_checked_in_configs_load() -> None:
    cfg = load_run_config(ROOT / "input" / "cagan.yaml")
    assert cfg.train.critic_steps == 3
    bench = load_run_config(ROOT / "input" / "bench.yaml")
    assert bench.bench.n_cells == 6 * 3 * 2


@pytest.mark.parametrize("in_file", [None, 0.5])
@pytest.mark.parametrize("on_cli", [None, 0.25])
def test_precedence_matrix(
    tmp_path: Path, in_file: Optional[float], on_cli: Optional[float]
) -> None:
    cfg_path = tmp_path / "run.yaml"
    lam_line = f"  lam: {in_file}\n" if in_file is not None else ""
    write_yaml(cfg_path, "train:\n  epochs: 7\n" + lam_line)
    cfg = load_run_config(cfg_path).with_overrides(lam=on_cli)
    expected = RunConfig().train.lam
    if in_file is not None:
        expected = in_file
    if on_cli is not None:
        expected = on_cli
    assert cfg.train.lam == expected
    assert cfg.train.epochs == 7


def test_json_config_is_accepted(tmp_path: Path) -> None:
    cfg_path = tmp_path / "run.json"
    raw = {"pc": {"alpha": 0.01}, "bench": {"seeds": [4, 5]}, "target": "y"}
    cfg_path.write_text(json.dumps(raw), encoding="utf-8")
    cfg = load_run_config(cfg_path)
    assert cfg.pc.alpha == 0.01
    assert cfg.bench.seeds == (4, 5)
    assert cfg.target == "y"


@pytest.mark.parametrize(
    "content, match",
    [
        ("train:\n  learning_rate: 0.1\n", "unknown training"),
        ("extra: 1\n", "unknown config sections"),
        ("bench:\n  datasets: [9nodes_10k]\n", "unknown benchmark"),
        ("bench:\n  seeds: [1, 1]\n", "duplicates"),
        ("pc:\n  alpha: 2.0\n", "alpha"),
        ("- 1\n- 2\n", "mapping"),
    ],
)
def test_invalid_configs(tmp_path: Path, content: str, match: str) -> None:
    cfg_path = tmp_path / "bad.yaml"
    write_yaml(cfg_path, content)
    with pytest.raises(UsageError, match=match):
        load_run_config(cfg_path)


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError, match="missing.yaml"):
        load_run_config(tmp_path / "missing.yaml")


def test_override_validation() -> None:
    with pytest.raises(UsageError):
        RunConfig().with_overrides(lam=-1.0)
    with pytest.raises(UsageError):
        RunConfig().with_overrides(workers=0)
    cfg = RunConfig().with_overrides(alpha=0.01, seeds=[7], target="X5")
    assert (cfg.pc.alpha, cfg.pc.max_depth, cfg.bench.seeds, cfg.target) == (0.01, 3, (7,), "X5")


def test_config_echo_and_hash(tmp_path: Path) -> None:
    cfg = RunConfig().with_overrides(epochs=5)
    p = write_config_echo(cfg, tmp_path / "diagnostics" / "config_echo.json")
    data = json.loads(p.read_text(encoding="utf-8"))
    assert data["train"]["epochs"] == 5
    assert data["bench"]["seeds"] == [1, 2, 3]
    assert list(data) == sorted(data)
    assert cfg.hash == RunConfig().with_overrides(epochs=5).hash
    assert cfg.hash != RunConfig().hash


def test_bench_config_counts_cells() -> None:
    b = BenchConfig(datasets=("4nodes_10k", "5nodes_10k"), seeds=(1, 2, 3), lambdas=(0.01, 0.0))
    assert b.n_cells == 12


def test_simulation_spec_file() -> None:
    name, spec = load_scm_file(ROOT / "input" / "chain_sim.yaml", seed=3)
    assert name == "chain4_mixed"
    assert spec.kinds == ("categorical", "continuous", "continuous", "categorical")
    assert spec.n_samples == 2000 and spec.seed == 3


def test_simulation_spec_errors(tmp_path: Path) -> None:
    graph = ROOT / "input" / "graphs" / "4nodes.json"
    bad = tmp_path / "sim.yaml"
    write_yaml(bad, f"graph: {graph}\nkinds: [continuous, continuous]\n")
    with pytest.raises(UsageError, match="kinds"):
        load_scm_file(bad)
    write_yaml(
        bad,
        f"graph: {graph}\n"
        "kinds: [continuous, continuous, categorical, continuous]\n"
        "n_categories: [0, 0, 2, 0]\n",
    )
    with pytest.raises(UsageError, match="continuous parent"):
        load_scm_file(bad)


def test_bench_accepts_csv_datasets(tmp_path: Path) -> None:
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    (data_dir / "adult.csv").write_text("age,income\n30,low\n40,high\n", encoding="utf-8")
    (data_dir / "credit.csv").write_text("amount,default\n1.5,no\n2.5,yes\n", encoding="utf-8")
    cfg_path = tmp_path / "bench.yaml"
    write_yaml(
        cfg_path,
        "bench:\n"
        "  datasets:\n"
        "    - 4nodes_10k\n"
        "    - {path: data/adult.csv, target: income}\n"
        "    - data/credit.csv\n",
    )
    bench = load_run_config(cfg_path).bench
    adult, credit = str(tmp_path / "data" / "adult.csv"), str(tmp_path / "data" / "credit.csv")
    assert bench.datasets == ("4nodes_10k", adult, credit)
    assert bench.target_for(adult) == "income"
    assert bench.target_for(credit) is None
    assert [dataset_label(d) for d in bench.datasets] == ["4nodes_10k", "adult", "credit"]
    assert is_csv_dataset(adult) and not is_csv_dataset("4nodes_10k")


def test_bench_csv_dataset_errors(tmp_path: Path) -> None:
    with pytest.raises(UsageError, match="not found"):
        BenchConfig(datasets=(str(tmp_path / "adult.csv"),))
    a = tmp_path / "a" / "adult.csv"
    b = tmp_path / "b" / "adult.csv"
    for p in (a, b):
        p.parent.mkdir()
        p.write_text("x,y\n1,a\n", encoding="utf-8")
    with pytest.raises(UsageError, match="collide"):
        BenchConfig(datasets=(str(a), str(b)))
    with pytest.raises(UsageError, match="not in the suite"):
        BenchConfig(datasets=(str(a),), targets=((str(b), "y"),))
    cfg_path = tmp_path / "bad.yaml"
    write_yaml(cfg_path, "bench:\n  datasets:\n    - {file: a/adult.csv}\n")
    with pytest.raises(UsageError, match="'path'"):
        load_run_config(cfg_path)
