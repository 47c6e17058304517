from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Ensure 'src' is on sys.path when invoked via subprocess
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
# Put 'src' first even if already present (e.g. via an editable install's .pth),
# otherwise this script's directory shadows the 'cagan' package.
if str(SRC) in sys.path:
    sys.path.remove(str(SRC))
sys.path.insert(0, str(SRC))

from core.logging_utils import (  # noqa: E402
    close_run_logger,
    get_git_sha,
    log_run_end,
    log_run_start,
    setup_run_logger,
)
from core.run_dir import create_run_directory  # noqa: E402
from diagnostics.perf import run_perf_profile  # noqa: E402
from pipeline import (  # noqa: E402
    RunConfig,
    UsageError,
    cmd_bench,
    cmd_discover,
    cmd_evaluate,
    cmd_generate,
    cmd_simulate,
    cmd_train,
    load_run_config,
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="YAML/JSON run config (flags override it)")
    p.add_argument("--debug", action="store_true", help="Enable DEBUG logging for this run")


def _add_pc(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None, help="Fisher-z test level")
    p.add_argument(
        "--max-depth", dest="max_depth", type=int, default=None, help="Deepest conditioning set"
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cagan", description="Causal-aware tabular GAN: simulate, train, generate, evaluate"
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Write a benchmark dataset and its ground-truth graph")
    _add_common(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--name", help="Benchmark id, e.g. 4nodes_10k")
    src.add_argument("--spec", help="YAML simulation spec (graph, kinds, n_categories)")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("discover", help="Run PC on a CSV and write DAG/CPDAG JSON")
    _add_common(p)
    _add_pc(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trace", action="store_true", help="Also write the CI-test trace CSV")

    p = sub.add_parser("train", help="Train a model on a CSV")
    _add_common(p)
    _add_pc(p)
    p.add_argument("--data", required=True)
    p.add_argument(
        "--out", required=True, help="Output directory for model.json and training_log.csv"
    )
    p.add_argument(
        "--graph", default=None, help="Reference graph JSON (PC on the data when omitted)"
    )
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="Causal loss weight")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument(
        "--k", dest="critic_steps", type=int, default=None, help="Critic steps per generator step"
    )
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--diagnostics", action="store_true", help="Write training curve PNG")

    p = sub.add_parser("generate", help="Sample rows from a trained model")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="Output CSV path")

    p = sub.add_parser("evaluate", help="Score a synthetic CSV against the real one")
    _add_common(p)
    _add_pc(p)
    p.add_argument("--real", required=True)
    p.add_argument("--fake", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None, help="Ground-truth graph JSON (enables SHD)")
    p.add_argument("--target", default=None, help="Categorical target column (enables F1)")
    p.add_argument("--test", default=None, help="Real test CSV for F1 (defaults to --real)")

    p = sub.add_parser("bench", help="Run the dataset x seed x lambda suite")
    _add_common(p)
    _add_pc(p)
    p.add_argument("--out", required=True)
    p.add_argument("--seeds", type=int, nargs="+", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--perf", action="store_true", help="Also write diagnostics/perf_profile.json")
    return ap


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    try:
        base = load_run_config(args.config)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    return base.with_overrides(
        lam=getattr(args, "lam", None),
        epochs=getattr(args, "epochs", None),
        critic_steps=getattr(args, "critic_steps", None),
        batch_size=getattr(args, "batch_size", None),
        seed=getattr(args, "seed", None) if args.command == "train" else None,
        alpha=getattr(args, "alpha", None),
        max_depth=getattr(args, "max_depth", None),
        seeds=getattr(args, "seeds", None),
        workers=getattr(args, "workers", None),
        target=getattr(args, "target", None),
    )


def _log_base(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    return out.parent if args.command == "generate" else out


def run(args: argparse.Namespace) -> None:
    config = _resolve_config(args)
    run_dir = create_run_directory(_log_base(args) / "logs")
    logger = setup_run_logger(run_dir / "cagan.log", debug=args.debug)
    log_run_start(
        logger,
        run_dir=run_dir,
        command=args.command,
        config_path=args.config,
        git_sha=get_git_sha(),
    )
    logger.debug("CONFIG hash=%s %s", config.hash, config.to_normalized_dict())
    status = "failed"
    try:
        if args.command == "simulate":
            cmd_simulate(args.out, name=args.name, spec_path=args.spec, seed=args.seed)
        elif args.command == "discover":
            cmd_discover(args.data, args.out, config, trace=args.trace)
        elif args.command == "train":
            cmd_train(
                args.data, args.out, config, graph_path=args.graph, diagnostics=args.diagnostics
            )
        elif args.command == "generate":
            cmd_generate(args.model, args.n, args.seed, args.out)
        elif args.command == "evaluate":
            cmd_evaluate(
                args.real,
                args.fake,
                args.out,
                config,
                truth_path=args.truth,
                target=args.target,
                test_path=args.test,
            )
        elif args.command == "bench":
            cmd_bench(config, args.out)
            if args.perf:
                run_perf_profile(config.train, out_base=args.out)
        status = "success"
    except Exception as exc:
        logger.error("RUN ERROR %s: %s", type(exc).__name__, exc)
        raise
    finally:
        log_run_end(logger, status=status)
        close_run_logger(logger)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
