"""PC causal discovery over numerically encoded data."""

from .ci import CiTestResult, PcConfig, correlation_matrix, fisher_z_from_corr, fisher_z_test
from .pc import (
    DiscoveryResult,
    OrientResult,
    SkeletonResult,
    ci_trace_frame,
    discover,
    orient,
    pc_skeleton,
    write_ci_trace,
)

__all__ = [
    "CiTestResult",
    "DiscoveryResult",
    "OrientResult",
    "PcConfig",
    "SkeletonResult",
    "ci_trace_frame",
    "correlation_matrix",
    "discover",
    "fisher_z_from_corr",
    "fisher_z_test",
    "orient",
    "pc_skeleton",
    "write_ci_trace",
]
