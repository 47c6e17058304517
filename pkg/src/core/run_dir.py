from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Optional


def generate_utc_timestamp() -> str:
    """Return a UTC timestamp in YYYYMMDDTHHMMSSZ format, e.g. 20250910T143015Z."""
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")


def create_run_directory(base_output_dir: str | Path, timestamp: Optional[str] = None) -> Path:
    """Create and return a unique timestamped directory under base_output_dir.

    Used for per-invocation log folders (``<out>/logs/<ts>``) so that reruns never clobber
    earlier logs while the data outputs themselves stay at stable, seed-determined paths.
    On a name collision numerical suffixes (-1, -2, ...) are appended.
    """
    base = Path(base_output_dir)
    base.mkdir(parents=True, exist_ok=True)

    ts = timestamp or generate_utc_timestamp()
    candidate = base / ts
    if not candidate.exists():
        candidate.mkdir(parents=True, exist_ok=False)
        return candidate

    suffix = 1
    while True:
        alt = base / f"{ts}-{suffix}"
        if not alt.exists():
            alt.mkdir(parents=True, exist_ok=False)
            return alt
        suffix += 1


def cell_directory(base_output_dir: str | Path, dataset: str, seed: int, lam: float) -> Path:
    """Stable output folder for one benchmark cell (dataset, seed, lambda)."""
    p = Path(base_output_dir) / "cells" / f"{dataset}__seed{int(seed)}__lam{lam:g}"
    p.mkdir(parents=True, exist_ok=True)
    return p
