"""Quality metrics for synthetic tables: causal SHD, downstream F1 and distance-based privacy."""

from .causal import causal_shd_eval, full_depth
from .privacy import (
    DCR_BINS,
    NndrResult,
    dcr,
    dcr_histogram,
    nndr,
    reid_weights,
    reidentification_risk,
    write_dcr_histogram,
)
from .report import EvalReport, config_hash, evaluate_tables
from .utility import ClassifierConfig, F1Result, ReferenceClassifier, downstream_f1, f1_score

__all__ = [
    "DCR_BINS",
    "ClassifierConfig",
    "EvalReport",
    "F1Result",
    "NndrResult",
    "ReferenceClassifier",
    "causal_shd_eval",
    "config_hash",
    "dcr",
    "dcr_histogram",
    "downstream_f1",
    "evaluate_tables",
    "f1_score",
    "full_depth",
    "nndr",
    "reid_weights",
    "reidentification_risk",
    "write_dcr_histogram",
]
