"""Causal graphs (DAG / CPDAG), orderings, consistent extension and SHD."""

from .dag import (
    CausalGraph,
    CycleError,
    enumerate_dags,
    find_cycle,
    is_acyclic,
    parents,
    topological_order,
)
from .extension import (
    ExtensionResult,
    NoConsistentExtensionError,
    consistent_extension,
    cpdag_to_dag,
)
from .io import graph_from_dict, graph_to_dict, read_graph_json, write_graph_json
from .shd import ShdMode, shd

__all__ = [
    "CausalGraph",
    "CycleError",
    "ExtensionResult",
    "NoConsistentExtensionError",
    "ShdMode",
    "consistent_extension",
    "cpdag_to_dag",
    "enumerate_dags",
    "find_cycle",
    "graph_from_dict",
    "graph_to_dict",
    "is_acyclic",
    "parents",
    "read_graph_json",
    "shd",
    "topological_order",
    "write_graph_json",
]
