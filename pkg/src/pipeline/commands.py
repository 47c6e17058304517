from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from cagan import (
    TrainingAborted,
    generate,
    load_checkpoint,
    save_checkpoint,
    train,
    write_training_log,
)
from core.run_dir import cell_directory
from data import Table, load_csv, numeric_matrix, split, write_schema_json
from diagnostics.plots import plot_dcr_histogram, plot_training_curves
from discovery import discover, write_ci_trace
from evaluation import EvalReport, evaluate_tables, write_dcr_histogram
from graph import CausalGraph, read_graph_json, write_graph_json
from simulate import make_benchmark, simulate, write_benchmark

from .config import (
    RunConfig,
    UsageError,
    dataset_label,
    is_csv_dataset,
    load_scm_file,
    write_config_echo,
)

logger = logging.getLogger("run")

SUMMARY_METRICS = ["shd", "f1", "dcr_mean", "reid_risk", "nndr_mean"]
CELL_COLUMNS = ["dataset", "seed", "lam", "status", *SUMMARY_METRICS, "seconds"]


def cmd_simulate(
    out_dir: str | Path,
    name: Optional[str] = None,
    spec_path: Optional[str | Path] = None,
    seed: int = 0,
) -> Dict[str, Path]:
    """Write a benchmark (or a custom simulation file) as CSV + graph JSON + schema JSON."""
    if (name is None) == (spec_path is None):
        raise UsageError("simulate needs exactly one of --name or --spec")
    if name is not None:
        table, graph = make_benchmark(name, seed=seed)
        label = name
    else:
        label, spec = load_scm_file(spec_path, seed=seed)  # type: ignore[arg-type]
        table, graph = simulate(spec), spec.graph
    paths = write_benchmark(table, graph, out_dir, label)
    logger.info(
        "SIMULATE WRITE name=%s rows=%d cols=%d path=%s",
        label,
        table.n_rows,
        table.n_columns,
        paths["data"],
    )
    print(f"rows={table.n_rows} columns={table.n_columns} data={paths['data']}")
    return paths


def cmd_discover(
    data_path: str | Path,
    out_dir: str | Path,
    config: RunConfig,
    trace: bool = False,
) -> Dict[str, Path]:
    table = load_csv(data_path)
    res = discover(numeric_matrix(table), config.pc, labels=table.schema.names)
    out = Path(out_dir)
    paths = {
        "dag": write_graph_json(res.dag, out / "dag.json"),
        "cpdag": write_graph_json(res.cpdag, out / "cpdag.json"),
    }
    if trace:
        paths["ci_trace"] = write_ci_trace(res, out / "ci_trace.csv")
    logger.info(
        "DISCOVER DONE rows=%d nodes=%d edges=%d flags=%s",
        table.n_rows,
        table.n_columns,
        res.dag.n_edges,
        ",".join(res.flags) or "none",
    )
    print(f"edges={res.dag.n_edges} flags={len(res.flags)} dag={paths['dag']}")
    return paths


def cmd_train(
    data_path: str | Path,
    out_dir: str | Path,
    config: RunConfig,
    graph_path: Optional[str | Path] = None,
    diagnostics: bool = False,
) -> Dict[str, Path]:
    """Train on a CSV; writes model.json, training_log.csv, config_echo.json and graph.json.

    An aborted run still writes the epochs it completed to training_log.csv before re-raising.
    """
    table = load_csv(data_path)
    truth = read_graph_json(graph_path) if graph_path is not None else None
    out = Path(out_dir)
    paths = {"config_echo": write_config_echo(config, out / "config_echo.json")}
    try:
        res = train(table, config.train, g_real=truth, pc_config=config.pc)
    except TrainingAborted as exc:
        write_training_log(exc.log, out / "training_log.csv")
        raise
    paths["log"] = write_training_log(res.log, out / "training_log.csv")
    paths["model"] = save_checkpoint(res.model, res.encoder, config.train, out / "model.json")
    paths["graph"] = write_graph_json(res.g_real, out / "graph.json")
    paths["schema"] = write_schema_json(table.schema, out / "schema.json")
    if diagnostics:
        paths["curves"] = plot_training_curves(res.log_frame(), out / "training_curves.png")
    for f in res.flags:
        logger.warning("TRAIN FLAG %s", f)
    print(f"epochs={len(res.log)} model={paths['model']}")
    return paths


def cmd_generate(model_path: str | Path, n: int, seed: int, out_path: str | Path) -> Path:
    if n < 0:
        raise UsageError(f"n must be >= 0, got {n}")
    ck = load_checkpoint(model_path)
    table = generate(ck.model, ck.encoder, n, seed)
    p = table.to_csv(out_path)
    logger.info("GENERATE WRITE rows=%d seed=%d path=%s", n, seed, p)
    print(f"rows={n} path={p}")
    return p


def _write_report(report: EvalReport, out: Path) -> Dict[str, Path]:
    hist = report.histogram_frame()
    paths = {"report": report.to_json(out / "report.json")}
    if len(hist):
        paths["dcr_hist"] = write_dcr_histogram(hist, out / "dcr_hist.csv")
        paths["dcr_plot"] = plot_dcr_histogram(hist, out / "dcr_hist.png")
    return paths


def cmd_evaluate(
    real_path: str | Path,
    fake_path: str | Path,
    out_dir: str | Path,
    config: RunConfig,
    truth_path: Optional[str | Path] = None,
    target: Optional[str] = None,
    test_path: Optional[str | Path] = None,
    dataset: str = "",
) -> EvalReport:
    """Every metric the inputs allow; SHD needs a truth graph and F1 a target column."""
    real = load_csv(real_path)
    fake = load_csv(fake_path, schema=real.schema)
    test = load_csv(test_path, schema=real.schema) if test_path is not None else None
    truth = read_graph_json(truth_path) if truth_path is not None else None
    report = evaluate_tables(
        real,
        fake,
        truth=truth,
        target=target or config.target,
        test=test,
        pc_config=config.pc,
        dataset=dataset or Path(real_path).stem,
        seeds=(config.train.seed,),
        hash_of_config=config.hash,
    )
    paths = _write_report(report, Path(out_dir))
    print(f"metrics={','.join(report.metrics)} report={paths['report']}")
    return report


@dataclass(frozen=True)
class BenchCell:
    dataset: str
    seed: int
    lam: float


def bench_cells(config: RunConfig) -> List[BenchCell]:
    b = config.bench
    return [BenchCell(d, s, lam) for d in b.datasets for s in b.seeds for lam in b.lambdas]


def _bench_target(
    table: Table, preferred: Optional[str], required: bool = False
) -> Optional[str]:
    names = table.schema.names
    if preferred in names and table.schema.column(preferred).is_categorical:
        return preferred
    if required:
        raise ValueError(f"target {preferred!r} is not a categorical column of {list(names)}")
    last = table.schema.columns[-1]
    return last.name if last.is_categorical else None


def _bench_table(cell: BenchCell, rows: Optional[int]) -> Tuple[Table, Optional[CausalGraph]]:
    """Simulated rows and their graph, or a user CSV with no known graph."""
    if not is_csv_dataset(cell.dataset):
        table, truth = make_benchmark(cell.dataset, seed=cell.seed)
        if rows is not None and rows < table.n_rows:
            table = table.take(np.arange(rows))
        return table, truth
    table = load_csv(cell.dataset)
    if rows is not None and rows < table.n_rows:
        keep = np.random.default_rng(cell.seed).choice(table.n_rows, size=rows, replace=False)
        table = table.take(np.sort(keep))
    return table, None


def run_cell(cell: BenchCell, config: RunConfig, out_dir: str | Path) -> Dict[str, Any]:
    """Load or simulate, split, train, generate and evaluate one (dataset, seed, lambda) cell.

    Without a known graph the reference graph comes from PC on the training fold and SHD is
    left out of the report.
    """
    t0 = time.perf_counter()
    label = dataset_label(cell.dataset)
    table, truth = _bench_table(cell, config.bench.rows)
    explicit = config.bench.target_for(cell.dataset)
    target = _bench_target(table, explicit or config.target, required=explicit is not None)
    train_part, test_part = split(table, config.bench.train_fraction, seed=cell.seed, target=target)
    train_cfg = replace(config.train, lam=cell.lam, seed=cell.seed)
    res = train(train_part, train_cfg, pc_config=config.pc)
    n_fake = config.bench.n_generate or train_part.n_rows
    fake = generate(res.model, res.encoder, n_fake, seed=cell.seed)

    cell_cfg = RunConfig(train_cfg, config.pc, config.bench, target)
    report = evaluate_tables(
        train_part,
        fake,
        truth=truth,
        target=target,
        test=test_part,
        pc_config=config.pc,
        dataset=label,
        seeds=(cell.seed,),
        hash_of_config=cell_cfg.hash,
    )
    seconds = time.perf_counter() - t0
    out = cell_directory(out_dir, label, cell.seed, cell.lam)
    write_training_log(res.log, out / "training_log.csv")
    if truth is None:
        write_graph_json(res.g_real, out / "reference_graph.json")
    _write_report(report, out)
    logger.info(
        "BENCH CELL dataset=%s seed=%d lam=%g seconds=%.2f shd=%s",
        label,
        cell.seed,
        cell.lam,
        seconds,
        report.shd,
    )
    return {"status": "ok", **report.summary(), "seconds": seconds}


def _safe_cell(cell: BenchCell, config: RunConfig, out_dir: str | Path) -> Dict[str, Any]:
    label = dataset_label(cell.dataset)
    row: Dict[str, Any] = {"dataset": label, "seed": cell.seed, "lam": cell.lam}
    try:
        row.update(run_cell(cell, config, out_dir))
    except Exception as exc:  # noqa: BLE001
        logger.error(
            "BENCH CELL FAILED dataset=%s seed=%d lam=%g error=%s",
            label,
            cell.seed,
            cell.lam,
            exc,
        )
        row.update({m: math.nan for m in SUMMARY_METRICS})
        row.update(status=f"failed: {exc}", seconds=math.nan)
    return row


def summarize(cells: pd.DataFrame) -> pd.DataFrame:
    """Mean and population std over seeds for every (dataset, lam) pair.

    Failed cells are skipped.
    """
    ok = cells[cells["status"] == "ok"]
    rows = []
    for (dataset, lam), grp in cells.groupby(["dataset", "lam"], sort=False):
        good = ok[(ok["dataset"] == dataset) & (ok["lam"] == lam)]
        row: Dict[str, Any] = {
            "dataset": dataset,
            "lam": lam,
            "runs": int(len(good)),
            "failed": int(len(grp) - len(good)),
        }
        for m in SUMMARY_METRICS:
            vals = good[m].astype(float).dropna()
            row[f"{m}_mean"] = float(vals.mean()) if len(vals) else math.nan
            row[f"{m}_std"] = float(vals.std(ddof=0)) if len(vals) else math.nan
        rows.append(row)
    return pd.DataFrame(rows)


def cmd_bench(config: RunConfig, out_dir: str | Path) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Run every cell, then write cells.csv, summary.csv and runtime.csv under ``out_dir``.

    summary.csv holds only seed-determined metrics so reruns reproduce it; wall-clock time
    goes to runtime.csv.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_config_echo(config, out / "config_echo.json")
    cells = bench_cells(config)
    logger.info("BENCH START cells=%d workers=%d", len(cells), config.bench.workers)
    if config.bench.workers > 1:
        workers = config.bench.workers
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="bench") as pool:
            rows = list(pool.map(lambda c: _safe_cell(c, config, out), cells))
    else:
        rows = [_safe_cell(c, config, out) for c in cells]

    frame = pd.DataFrame(rows, columns=CELL_COLUMNS)
    summary = summarize(frame)
    frame.drop(columns=["seconds"]).to_csv(out / "cells.csv", index=False)
    summary.to_csv(out / "summary.csv", index=False)
    by_pair = frame.groupby(["dataset", "lam"], sort=False)["seconds"]
    runtime = by_pair.agg(["mean", "std"]).reset_index()
    runtime.to_csv(out / "runtime.csv", index=False)
    failed = int((frame["status"] != "ok").sum())
    logger.info("BENCH END cells=%d failed=%d", len(frame), failed)
    print(f"cells={len(frame)} failed={failed} summary={out / 'summary.csv'}")
    return frame, summary
