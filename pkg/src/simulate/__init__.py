"""Ground-truth SCMs and the synthetic benchmark suite."""

from .benchmarks import (
    FIXTURE_DIR,
    benchmark_names,
    benchmark_spec,
    fixture_graph,
    make_benchmark,
    parse_benchmark_name,
    random_scm,
    write_benchmark,
)
from .scm import (
    ScmSpec,
    coefficient_matrix,
    implied_covariance,
    simulate,
    simulate_linear_sem,
    simulate_mixed,
    simulate_multinomial_bn,
)

__all__ = [
    "FIXTURE_DIR",
    "ScmSpec",
    "benchmark_names",
    "benchmark_spec",
    "coefficient_matrix",
    "fixture_graph",
    "implied_covariance",
    "make_benchmark",
    "parse_benchmark_name",
    "random_scm",
    "simulate",
    "simulate_linear_sem",
    "simulate_mixed",
    "simulate_multinomial_bn",
    "write_benchmark",
]
