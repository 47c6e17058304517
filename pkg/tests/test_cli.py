from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path
from typing import List

ROOT = Path(__file__).resolve().parents[1]


def run_cli(args: List[str]) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "scripts/cagan.py", *args],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )


def _log_text(base: Path) -> str:
    runs = sorted((base / "logs").iterdir())
    assert runs, "no log directory created"
    log = runs[-1] / "cagan.log"
    assert log.exists()
    return log.read_text(encoding="utf-8")


def test_cli_simulate(tmp_path: Path) -> None:
    res = run_cli(["simulate", "--name", "4nodes_10k", "--seed", "1", "--out", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    assert "rows=10000 columns=4" in res.stdout
    assert (tmp_path / "4nodes_10k.csv").exists()
    assert (tmp_path / "4nodes_10k.graph.json").exists()
    text = _log_text(tmp_path)
    assert "RUN START" in text
    assert "SIMULATE WRITE" in text
    assert "status=success" in text


def test_cli_simulate_unknown_name(tmp_path: Path) -> None:
    res = run_cli(["simulate", "--name", "9nodes_10k", "--out", str(tmp_path)])
    assert res.returncode != 0
    assert "4nodes_10k" in res.stderr
    assert "status=failed" in _log_text(tmp_path)


def test_cli_train_generate_evaluate(tmp_path: Path) -> None:
    sim = tmp_path / "sim"
    assert run_cli(["simulate", "--name", "5nodes_mixed_10k", "--out", str(sim)]).returncode == 0
    data = sim / "5nodes_mixed_10k.csv"
    lines = data.read_text(encoding="utf-8").splitlines()[:301]
    small = tmp_path / "small.csv"
    small.write_text("\n".join(lines) + "\n", encoding="utf-8")

    model_dir = tmp_path / "model"
    res = run_cli([
        "train",
        "--data", str(small),
        "--out", str(model_dir),
        "--graph", str(sim / "5nodes_mixed_10k.graph.json"),
        "--epochs", "2",
        "--k", "1",
        "--batch-size", "32",
        "--lambda", "0",
        "--debug",
    ])
    assert res.returncode == 0, res.stderr
    assert (model_dir / "model.json").exists()
    assert len((model_dir / "training_log.csv").read_text(encoding="utf-8").splitlines()) == 3
    assert "TRAIN EPOCH" in _log_text(model_dir)

    fake = tmp_path / "fake" / "fake.csv"
    res = run_cli([
        "generate",
        "--model", str(model_dir / "model.json"),
        "--n", "150",
        "--seed", "3",
        "--out", str(fake),
    ])
    assert res.returncode == 0, res.stderr
    assert len(fake.read_text(encoding="utf-8").splitlines()) == 151
    assert (fake.parent / "logs").is_dir()

    eval_dir = tmp_path / "eval"
    res = run_cli([
        "evaluate",
        "--real", str(small),
        "--fake", str(fake),
        "--out", str(eval_dir),
        "--truth", str(sim / "5nodes_mixed_10k.graph.json"),
        "--target", "X3",
    ])
    assert res.returncode == 0, res.stderr
    report = json.loads((eval_dir / "report.json").read_text(encoding="utf-8"))
    assert report["n_fake"] == 150
    assert isinstance(report["shd"], int)
    assert 0.0 <= report["reid_risk"] <= 1.0


def test_cli_missing_data_file(tmp_path: Path) -> None:
    res = run_cli(["train", "--data", str(tmp_path / "nope.csv"), "--out", str(tmp_path)])
    assert res.returncode == 1
    assert "nope.csv" in res.stderr


def test_cli_usage_errors(tmp_path: Path) -> None:
    bad = tmp_path / "bad.yaml"
    bad.write_text("train:\n  learning_rate: 0.1\n", encoding="utf-8")
    simulate = ["simulate", "--name", "4nodes_10k", "--out", str(tmp_path)]
    res = run_cli([*simulate, "--config", str(bad)])
    assert res.returncode == 2
    assert "learning_rate" in res.stderr

    res = run_cli([*simulate, "--config", str(tmp_path / "missing.yaml")])
    assert res.returncode == 2

    res = run_cli(["train", "--data", "x.csv", "--out", str(tmp_path), "--lambda", "-1"])
    assert res.returncode == 2

    res = run_cli(["simulate", "--out", str(tmp_path)])
    assert res.returncode == 2
