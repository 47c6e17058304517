from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Optional

import numpy as np

from cagan import TrainConfig, train
from simulate import make_benchmark


def run_perf_profile(
    config: Optional[TrainConfig] = None,
    *,
    out_base: str | Path | None = None,
    dataset: str = "4nodes_10k",
    rows: int = 2000,
    epochs: int = 2,
) -> Path:
    """Time one reduced-scale training run and write diagnostics/perf_profile.json."""
    cfg = (config or TrainConfig()).with_overrides(epochs=epochs)
    table, truth = make_benchmark(dataset, seed=cfg.seed)
    if rows < table.n_rows:
        table = table.take(np.arange(rows))

    t0 = time.perf_counter()
    res = train(table, cfg, g_real=truth)
    t1 = time.perf_counter()

    base = Path(out_base) if out_base is not None else Path("output")
    out = base / "diagnostics" / "perf_profile.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({
        "dataset": dataset,
        "epochs": int(len(res.log)),
        "seconds": float(t1 - t0),
        "rows": int(table.n_rows),
        "cols": int(table.n_columns),
        "steps_per_epoch": int(cfg.steps_for(table.n_rows)),
    }, indent=2))
    return out
