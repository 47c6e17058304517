from __future__ import annotations

import logging
import os
import subprocess
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

LOG_LEVEL_ENV = "CAGAN_LOG_LEVEL"


def get_git_sha() -> Optional[str]:
    """Return the current git commit SHA, if available; otherwise None."""
    try:
        sha = subprocess.check_output(
            ["git", "rev-parse", "HEAD"], stderr=subprocess.DEVNULL, text=True
        ).strip()
        return sha or None
    except Exception:
        return None


def resolve_log_level(debug: bool = False) -> int:
    """Level from the --debug flag, else from CAGAN_LOG_LEVEL, else INFO."""
    if debug:
        return logging.DEBUG
    name = os.environ.get(LOG_LEVEL_ENV, "").strip().upper()
    if name in {"DEBUG", "INFO", "WARNING", "ERROR"}:
        return int(getattr(logging, name))
    return logging.INFO


def setup_run_logger(log_path: Path, debug: bool = False) -> logging.Logger:
    """Create or return the process-wide "run" logger writing to log_path.

    Handler setup is idempotent so repeated CLI calls in one process (tests, bench cells)
    do not duplicate lines.
    """
    log_path.parent.mkdir(parents=True, exist_ok=True)

    logger = logging.getLogger("run")
    logger.setLevel(resolve_log_level(debug))

    for h in list(logger.handlers):
        if isinstance(h, logging.FileHandler):
            try:
                if Path(h.baseFilename) == log_path.resolve():
                    return logger
            except Exception:
                continue

    fh = logging.FileHandler(log_path, encoding="utf-8")
    fh.setLevel(logging.DEBUG)
    fh.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    logger.addHandler(fh)
    return logger


def close_run_logger(logger: logging.Logger) -> None:
    for h in list(logger.handlers):
        if isinstance(h, logging.FileHandler):
            h.close()
            logger.removeHandler(h)


def log_run_start(
    logger: logging.Logger,
    run_dir: Path,
    command: str,
    config_path: Path | str | None,
    git_sha: Optional[str],
) -> None:
    ts = datetime.now(timezone.utc).isoformat()
    logger.info(
        "RUN START utc=%s command=%s run_dir=%s config=%s git_sha=%s",
        ts,
        command,
        str(run_dir),
        str(config_path) if config_path is not None else "none",
        git_sha or "none",
    )


def log_run_end(logger: logging.Logger, status: str = "success") -> None:
    ts = datetime.now(timezone.utc).isoformat()
    logger.info("RUN END utc=%s status=%s", ts, status)
