from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import yaml

from cagan import TrainConfig
from discovery import PcConfig
from evaluation import config_hash
from graph import read_graph_json
from simulate import ScmSpec, parse_benchmark_name, random_scm


class UsageError(ValueError):
    """Bad command-line arguments or configuration; the CLI exits with status 2."""


def is_csv_dataset(entry: str) -> bool:
    """Bench entries ending in .csv are user tables; everything else is a benchmark id."""
    return entry.lower().endswith(".csv")


def dataset_label(entry: str) -> str:
    return Path(entry).stem if is_csv_dataset(entry) else entry


@dataclass(frozen=True)
class BenchConfig:
    """Benchmark suite: every dataset x seed x lambda cell is trained, sampled and evaluated.

    ``datasets`` holds benchmark ids and CSV paths. A CSV has no known graph, so its cells
    train against PC on the training fold and report no SHD. ``targets`` pairs a dataset entry
    with its classification column. ``rows`` caps the rows taken from each dataset (a seeded
    subsample for CSVs); ``n_generate`` defaults to the size of the training fold.
    """

    datasets: Tuple[str, ...] = ("4nodes_10k",)
    seeds: Tuple[int, ...] = (1, 2, 3)
    lambdas: Tuple[float, ...] = (0.01, 0.0)
    workers: int = 1
    train_fraction: float = 0.8
    rows: Optional[int] = None
    n_generate: Optional[int] = None
    targets: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.datasets:
            raise UsageError("bench.datasets must list at least one dataset")
        for name in self.datasets:
            if is_csv_dataset(name):
                if not Path(name).exists():
                    raise UsageError(f"bench dataset file not found: {name}")
                continue
            try:
                parse_benchmark_name(name)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        labels = [dataset_label(d) for d in self.datasets]
        if len(set(labels)) != len(labels):
            raise UsageError(f"bench.datasets names collide: {labels}")
        stray = sorted({d for d, _ in self.targets} - set(self.datasets))
        if stray:
            raise UsageError(f"bench targets name datasets not in the suite: {stray}")
        if not self.seeds:
            raise UsageError("bench.seeds must list at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise UsageError(f"bench.seeds contains duplicates: {list(self.seeds)}")
        if not self.lambdas or any(v < 0 for v in self.lambdas):
            raise UsageError(f"bench.lambdas must be non-empty and >= 0, got {list(self.lambdas)}")
        if self.workers < 1:
            raise UsageError(f"bench.workers must be >= 1, got {self.workers}")
        if not 0.0 < self.train_fraction < 1.0:
            raise UsageError(f"bench.train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.rows is not None and self.rows < 4:
            raise UsageError(f"bench.rows must be >= 4, got {self.rows}")
        if self.n_generate is not None and self.n_generate < 1:
            raise UsageError(f"bench.n_generate must be >= 1, got {self.n_generate}")

    @property
    def n_cells(self) -> int:
        return len(self.datasets) * len(self.seeds) * len(self.lambdas)

    def target_for(self, dataset: str) -> Optional[str]:
        return dict(self.targets).get(dataset)

    @classmethod
    def from_mapping(
        cls, raw: Optional[Mapping[str, Any]], base_dir: Optional[Path] = None
    ) -> BenchConfig:
        """Dataset items are ids, CSV paths, or ``{path: ..., target: ...}`` mappings.

        Relative CSV paths resolve against ``base_dir`` (the config file's folder).
        """
        raw = dict(raw or {})
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown bench settings: {sorted(unknown)}")
        base = cls()
        try:
            datasets: List[str] = []
            targets: Dict[str, str] = {}
            for item in raw.get("datasets", base.datasets):
                target = None
                if isinstance(item, Mapping):
                    extra = set(item) - {"path", "target"}
                    if "path" not in item or extra:
                        raise UsageError(
                            f"bench dataset mappings take 'path' and 'target', got {dict(item)}"
                        )
                    item, target = item["path"], item.get("target")
                entry = _resolve_dataset(str(item), base_dir)
                datasets.append(entry)
                if target is not None:
                    targets[entry] = str(target)
            for name, target in dict(raw.get("targets") or {}).items():
                targets[_resolve_dataset(str(name), base_dir)] = str(target)
            return cls(
                datasets=tuple(datasets),
                seeds=tuple(int(s) for s in raw.get("seeds", base.seeds)),
                lambdas=tuple(float(v) for v in raw.get("lambdas", base.lambdas)),
                workers=int(raw.get("workers", base.workers)),
                train_fraction=float(raw.get("train_fraction", base.train_fraction)),
                rows=_opt_int(raw.get("rows", base.rows)),
                n_generate=_opt_int(raw.get("n_generate", base.n_generate)),
                targets=tuple(sorted(targets.items())),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"invalid bench settings: {exc}") from None


def _resolve_dataset(entry: str, base_dir: Optional[Path]) -> str:
    if base_dir is None or not is_csv_dataset(entry) or Path(entry).is_absolute():
        return entry
    return str(base_dir / entry)


def _opt_int(v: Any) -> Optional[int]:
    return None if v is None else int(v)


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every subcommand; built from defaults, then a config file, then flags."""

    train: TrainConfig = field(default_factory=TrainConfig)
    pc: PcConfig = field(default_factory=PcConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)
    target: Optional[str] = None

    def with_overrides(
        self,
        lam: Optional[float] = None,
        epochs: Optional[int] = None,
        critic_steps: Optional[int] = None,
        batch_size: Optional[int] = None,
        seed: Optional[int] = None,
        alpha: Optional[float] = None,
        max_depth: Optional[int] = None,
        seeds: Optional[Sequence[int]] = None,
        workers: Optional[int] = None,
        target: Optional[str] = None,
    ) -> RunConfig:
        """Flags left as None keep the file or default value."""
        try:
            train = self.train.with_overrides(
                lam=lam, epochs=epochs, critic_steps=critic_steps, batch_size=batch_size, seed=seed
            )
            pc = self.pc
            if alpha is not None or max_depth is not None:
                pc = PcConfig(
                    alpha=self.pc.alpha if alpha is None else alpha,
                    max_depth=self.pc.max_depth if max_depth is None else max_depth,
                    rho_clamp=self.pc.rho_clamp,
                )
            bench = self.bench
            if seeds is not None:
                bench = replace(bench, seeds=tuple(int(s) for s in seeds))
            if workers is not None:
                bench = replace(bench, workers=workers)
        except UsageError:
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return RunConfig(train, pc, bench, self.target if target is None else target)

    def to_normalized_dict(self) -> Dict[str, Any]:
        return {
            "train": self.train.to_dict(),
            "pc": self.pc.to_dict(),
            "bench": {
                k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.bench).items()
            },
            "target": self.target,
        }

    @property
    def hash(self) -> str:
        return config_hash(self.to_normalized_dict())


_SECTIONS = {"train", "pc", "bench", "target"}


def load_run_config(path: Optional[str | os.PathLike[str]]) -> RunConfig:
    """Read a YAML (or JSON) run config; ``None`` gives the built-in defaults."""
    if path is None:
        return RunConfig()
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {p}")
    with p.open("r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise UsageError(f"config {p} must be a mapping at top level")
    unknown = set(raw) - _SECTIONS
    if unknown:
        raise UsageError(f"unknown config sections in {p}: {sorted(unknown)}")
    try:
        train = TrainConfig.from_mapping(raw.get("train"))
        pc = PcConfig.from_mapping(raw.get("pc"))
    except ValueError as exc:
        raise UsageError(f"{p}: {exc}") from None
    bench = BenchConfig.from_mapping(raw.get("bench"), base_dir=p.parent)
    target = raw.get("target")
    return RunConfig(train, pc, bench, None if target is None else str(target))


def write_config_echo(config: RunConfig, out_path: str | os.PathLike[str]) -> Path:
    """Normalized config echo JSON (sorted keys) next to run outputs."""
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as f:
        json.dump(config.to_normalized_dict(), f, indent=2, sort_keys=True)
    return out


def load_scm_file(path: str | os.PathLike[str], seed: int = 0) -> Tuple[str, ScmSpec]:
    """Custom simulation from YAML: graph JSON path, per-node kinds and category counts.

    Relative graph paths resolve against the spec file's folder.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"simulation spec not found: {p}")
    with p.open("r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise UsageError(f"simulation spec {p} must be a mapping")
    for key in ("graph", "kinds"):
        if key not in raw:
            raise UsageError(f"simulation spec {p} is missing '{key}'")
    graph_path = Path(str(raw["graph"]))
    if not graph_path.is_absolute():
        graph_path = p.parent / graph_path
    graph = read_graph_json(graph_path)
    kinds = tuple(str(k) for k in raw["kinds"])
    if len(kinds) != graph.n_nodes:
        raise UsageError(f"simulation spec lists {len(kinds)} kinds for {graph.n_nodes} nodes")
    if any(k not in ("continuous", "categorical") for k in kinds):
        raise UsageError(f"kinds must be 'continuous' or 'categorical', got {list(kinds)}")
    cats = tuple(int(k) for k in raw.get("n_categories", [0] * graph.n_nodes))
    name = str(raw.get("name", p.stem))
    try:
        spec = random_scm(
            graph,
            kinds,  # type: ignore[arg-type]
            cats,
            param_seed=int(raw.get("param_seed", 0)),
            n_samples=int(raw.get("n_samples", 1000)),
            seed=seed,
        )
    except (ValueError, IndexError) as exc:
        raise UsageError(f"invalid simulation spec {p}: {exc}") from None
    return name, spec
