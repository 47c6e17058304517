from __future__ import annotations

import json
from pathlib import Path

from cagan import TrainConfig
from diagnostics.perf import run_perf_profile


def test_perf_profile_runs_quickly(tmp_path: Path) -> None:
    cfg = TrainConfig(batch_size=100, steps_per_epoch=2, critic_steps=1, lam=0.0)
    p = run_perf_profile(cfg, out_base=tmp_path, rows=400, epochs=2)
    data = json.loads(Path(p).read_text())
    assert p == tmp_path / "diagnostics" / "perf_profile.json"
    assert data["epochs"] == 2
    assert data["rows"] == 400
    assert data["cols"] == 4
    assert data["seconds"] >= 0.0
