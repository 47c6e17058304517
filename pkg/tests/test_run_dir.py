from __future__ import annotations

import re
from pathlib import Path

from core.run_dir import cell_directory, create_run_directory

TS_RE = re.compile(r"^\d{8}T\d{6}Z(?:-\d+)?$")


def test_log_directories_never_collide(tmp_path: Path) -> None:
    logs = tmp_path / "out" / "logs"
    ts = "20260101T000000Z"
    made = [create_run_directory(logs, timestamp=ts) for _ in range(3)]
    assert [p.name for p in made] == [ts, f"{ts}-1", f"{ts}-2"]
    assert all(p.is_dir() for p in made)


def test_log_directory_name_is_utc_stamp(tmp_path: Path) -> None:
    p = create_run_directory(tmp_path / "logs")
    assert p.parent == tmp_path / "logs"
    assert TS_RE.match(p.name)


def test_cell_directory_is_stable(tmp_path: Path) -> None:
    p1 = cell_directory(tmp_path, "4nodes_10k", 2, 0.01)
    p2 = cell_directory(tmp_path, "4nodes_10k", 2, 0.01)
    assert p1 == p2 and p1.is_dir()
    assert p1 == tmp_path / "cells" / "4nodes_10k__seed2__lam0.01"
    assert cell_directory(tmp_path, "4nodes_10k", 2, 0.0).name == "4nodes_10k__seed2__lam0"
