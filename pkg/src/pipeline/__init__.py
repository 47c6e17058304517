"""Command implementations and run configuration behind scripts/cagan.py."""

from .commands import (
    BenchCell,
    bench_cells,
    cmd_bench,
    cmd_discover,
    cmd_evaluate,
    cmd_generate,
    cmd_simulate,
    cmd_train,
    run_cell,
    summarize,
)
from .config import (
    BenchConfig,
    RunConfig,
    UsageError,
    dataset_label,
    is_csv_dataset,
    load_run_config,
    load_scm_file,
    write_config_echo,
)

__all__ = [
    "BenchCell",
    "BenchConfig",
    "RunConfig",
    "UsageError",
    "bench_cells",
    "cmd_bench",
    "cmd_discover",
    "cmd_evaluate",
    "cmd_generate",
    "cmd_simulate",
    "cmd_train",
    "dataset_label",
    "is_csv_dataset",
    "load_run_config",
    "load_scm_file",
    "run_cell",
    "summarize",
    "write_config_echo",
]
