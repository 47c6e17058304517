from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from data import Table, fit_encoder
from discovery import PcConfig
from graph import CausalGraph

from .causal import causal_shd_eval
from .privacy import DCR_BINS, dcr, dcr_histogram, nndr, reidentification_risk
from .utility import ClassifierConfig, downstream_f1

logger = logging.getLogger("run")

REPORT_VERSION = 1


def config_hash(config: Mapping[str, Any]) -> str:
    """SHA-256 of the sorted-key JSON echo of a configuration mapping."""
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class EvalReport:
    dataset: str = ""
    seeds: Tuple[int, ...] = ()
    config_hash: Optional[str] = None
    n_real: int = 0
    n_fake: int = 0
    shd: Optional[int] = None
    f1: Optional[float] = None
    f1_average: Optional[str] = None
    reid_risk: Optional[float] = None
    dcr: Tuple[float, ...] = ()
    dcr_histogram: Tuple[Tuple[float, float, int], ...] = ()
    nndr: Tuple[float, ...] = ()
    nndr_mean: Optional[float] = None
    nndr_sem: Optional[float] = None
    flags: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for name in ("f1", "reid_risk", "nndr_mean", "nndr_sem"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.shd is not None and self.shd < 0:
            raise ValueError(f"shd must be >= 0, got {self.shd}")
        if self.reid_risk is not None and not 0.0 <= self.reid_risk <= 1.0:
            raise ValueError(f"reid_risk must be in [0, 1], got {self.reid_risk}")
        if any(not 0.0 <= v <= 1.0 for v in self.nndr):
            raise ValueError("nndr values must lie in [0, 1]")
        if any(not (math.isfinite(v) and v >= 0.0) for v in self.dcr):
            raise ValueError("dcr values must be finite and >= 0")

    @property
    def dcr_mean(self) -> Optional[float]:
        return float(np.mean(self.dcr)) if self.dcr else None

    @property
    def metrics(self) -> List[str]:
        present = {
            "shd": self.shd is not None,
            "f1": self.f1 is not None,
            "dcr": bool(self.dcr),
            "reid_risk": self.reid_risk is not None,
            "nndr": self.nndr_mean is not None,
        }
        return [k for k, ok in present.items() if ok]

    def histogram_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.dcr_histogram), columns=["bin_left", "bin_right", "count"])

    def summary(self) -> Dict[str, Optional[float]]:
        """Scalar metrics only, one entry per metric."""
        return {
            "shd": None if self.shd is None else float(self.shd),
            "f1": self.f1,
            "dcr_mean": self.dcr_mean,
            "reid_risk": self.reid_risk,
            "nndr_mean": self.nndr_mean,
        }

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["report_version"] = REPORT_VERSION
        out["seeds"] = list(self.seeds)
        out["dcr"] = list(self.dcr)
        out["dcr_histogram"] = [list(b) for b in self.dcr_histogram]
        out["nndr"] = list(self.nndr)
        out["flags"] = list(self.flags)
        return out

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> EvalReport:
        data = dict(raw)
        version = data.pop("report_version", REPORT_VERSION)
        if version != REPORT_VERSION:
            raise ValueError(f"unsupported report_version {version!r}; expected {REPORT_VERSION}")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown report fields: {sorted(unknown)}")
        data["seeds"] = tuple(int(s) for s in data.get("seeds", ()))
        data["dcr"] = tuple(float(v) for v in data.get("dcr", ()))
        data["dcr_histogram"] = tuple(
            (float(a), float(b), int(c)) for a, b, c in data.get("dcr_histogram", ())
        )
        data["nndr"] = tuple(float(v) for v in data.get("nndr", ()))
        data["flags"] = tuple(str(f) for f in data.get("flags", ()))
        return cls(**data)

    def to_json(self, path: str | Path) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        return p

    @classmethod
    def from_json(cls, path: str | Path) -> EvalReport:
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"report not found: {p}")
        return cls.from_dict(json.loads(p.read_text(encoding="utf-8")))


def evaluate_tables(
    real: Table,
    fake: Table,
    truth: Optional[CausalGraph] = None,
    target: Optional[str] = None,
    test: Optional[Table] = None,
    pc_config: Optional[PcConfig] = None,
    classifier: ClassifierConfig = ClassifierConfig(),
    dataset: str = "",
    seeds: Sequence[int] = (),
    hash_of_config: Optional[str] = None,
    bins: int = DCR_BINS,
) -> EvalReport:
    """Every metric whose inputs are available.

    Distances are measured in the encoding fitted on ``real``. SHD needs ``truth``; F1 needs
    ``target`` and is scored on ``test`` (``real`` when omitted).
    """
    if fake.schema.names != real.schema.names:
        raise ValueError(
            f"fake columns {list(fake.schema.names)} do not match real {list(real.schema.names)}"
        )
    if real.n_rows == 0:
        raise ValueError("evaluation needs at least one real row")
    flags: List[str] = []
    fields: Dict[str, Any] = {}

    if truth is not None and fake.n_rows > 0:
        fields["shd"] = causal_shd_eval(truth, fake, pc_config)
    if target is not None and fake.n_rows > 0:
        res = downstream_f1(fake, test if test is not None else real, target, classifier)
        fields["f1"] = res.score
        fields["f1_average"] = res.average
        flags.extend(f"f1:{f}" for f in res.flags)

    encoder = fit_encoder(real)
    x_real = encoder.encode(real)
    x_fake = encoder.encode(fake, unknown="ignore")
    if fake.n_rows > 0:
        d = dcr(x_fake, x_real)
        hist = dcr_histogram(d, bins)
        fields["dcr"] = tuple(float(v) for v in d)
        fields["dcr_histogram"] = tuple(
            (float(r.bin_left), float(r.bin_right), int(r.count))
            for r in hist.itertuples(index=False)
        )
        if real.n_rows >= 2:
            fields["reid_risk"] = reidentification_risk(x_real, x_fake)
            nn = nndr(x_fake, x_real)
            fields["nndr"] = tuple(float(v) for v in nn.values)
            fields["nndr_mean"] = nn.mean
            fields["nndr_sem"] = nn.sem

    report = EvalReport(
        dataset=dataset,
        seeds=tuple(int(s) for s in seeds),
        config_hash=hash_of_config,
        n_real=real.n_rows,
        n_fake=fake.n_rows,
        flags=tuple(flags),
        **fields,
    )
    if not report.metrics:
        raise ValueError("no metric could be computed from the given inputs")
    logger.info(
        "EVAL REPORT dataset=%s metrics=%s %s",
        dataset or "none",
        ",".join(report.metrics),
        " ".join(f"{k}={v:.4f}" for k, v in report.summary().items() if v is not None),
    )
    return report
