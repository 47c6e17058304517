from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from autodiff import Tensor
from data import Encoder
from graph import CausalGraph, graph_from_dict, graph_to_dict

from .config import TrainConfig
from .model import CaganModel, build

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    model: CaganModel
    encoder: Encoder
    config: TrainConfig

    @property
    def graph(self) -> CausalGraph:
        return self.model.graph


def _named(params: List[Tensor]) -> Dict[str, Tensor]:
    out: Dict[str, Tensor] = {}
    for p in params:
        if not p.name or p.name in out:
            raise ValueError(f"parameter names must be unique and non-empty, got {p.name!r}")
        out[p.name] = p
    return out


def checkpoint_dict(model: CaganModel, encoder: Encoder, config: TrainConfig) -> Dict[str, Any]:
    params = _named([*model.generator_parameters(), *model.discriminator_parameters()])
    stats = {bn.name: bn.stats_dict() for g in model.generators for bn in g.batch_norms()}
    return {
        "format_version": FORMAT_VERSION,
        "config": config.to_dict(),
        "encoder": encoder.to_dict(),
        "graph": graph_to_dict(model.graph),
        "parameters": {k: v.values.tolist() for k, v in params.items()},
        "batch_norm": stats,
    }


def save_checkpoint(
    model: CaganModel, encoder: Encoder, config: TrainConfig, path: str | Path
) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(checkpoint_dict(model, encoder, config)), encoding="utf-8")
    return p


def load_checkpoint(path: str | Path) -> Checkpoint:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"checkpoint not found: {p}")
    raw = json.loads(p.read_text(encoding="utf-8"))
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(
            f"unsupported checkpoint format_version {version!r}; expected {FORMAT_VERSION}"
        )
    config = TrainConfig.from_mapping(raw["config"])
    encoder = Encoder.from_dict(raw["encoder"])
    graph = graph_from_dict(raw["graph"])
    model = build(graph, encoder.schema, config, np.random.default_rng(0))

    params = _named([*model.generator_parameters(), *model.discriminator_parameters()])
    stored = raw["parameters"]
    if set(stored) != set(params):
        missing = sorted(set(params) - set(stored))
        extra = sorted(set(stored) - set(params))
        raise ValueError(
            f"checkpoint parameters do not match the model: missing={missing} extra={extra}"
        )
    for name, tensor in params.items():
        values = np.array(stored[name], dtype=np.float64).reshape(tensor.shape)
        tensor.values[...] = values
    for g in model.generators:
        for bn in g.batch_norms():
            bn.load_stats(raw["batch_norm"][bn.name])
    return Checkpoint(model, encoder, config)
