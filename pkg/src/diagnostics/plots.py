from __future__ import annotations

from pathlib import Path

import pandas as pd
from matplotlib.figure import Figure

# No pyplot here: bench cells plot from worker threads.


def plot_training_curves(log: pd.DataFrame, out_path: str | Path) -> Path:
    """Critic estimate of the Wasserstein distance and structural reward per epoch."""
    p = Path(out_path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fig = Figure(figsize=(8, 6))
    ax_w, ax_r = fig.subplots(2, 1, sharex=True)
    ax_w.plot(log["epoch"], log["w_distance"], label="W distance")
    ax_w.set_ylabel("critic W estimate")
    ax_w.grid(True, alpha=0.3)
    reward = log["reward"].astype(float)
    if reward.notna().any():
        ax_r.plot(log["epoch"], reward, label="reward", color="tab:green")
        ax_r.plot(
            log["epoch"], -log["shd"].astype(float), label="-SHD", color="tab:red", linestyle="--"
        )
        ax_r.legend()
    else:
        ax_r.text(
            0.5,
            0.5,
            "no structural reward (lambda = 0)",
            ha="center",
            va="center",
            transform=ax_r.transAxes,
        )
    ax_r.set_ylabel("reward")
    ax_r.set_xlabel("epoch")
    ax_r.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(p)
    return p


def plot_dcr_histogram(
    hist: pd.DataFrame, out_path: str | Path, title: str = "Distance to closest record"
) -> Path:
    p = Path(out_path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fig = Figure(figsize=(7, 4))
    ax = fig.subplots()
    widths = hist["bin_right"] - hist["bin_left"]
    ax.bar(hist["bin_left"], hist["count"], width=widths, align="edge", edgecolor="white")
    ax.set_title(title)
    ax.set_xlabel("DCR")
    ax.set_ylabel("fake rows")
    ax.grid(True, alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(p)
    return p
