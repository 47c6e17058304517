from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List

from .dag import CausalGraph


def graph_to_dict(graph: CausalGraph) -> Dict[str, object]:
    return {
        "nodes": list(graph.labels),
        "directed": [[a, b] for a, b in sorted(graph.directed)],
        "undirected": [[a, b] for a, b in sorted(graph.undirected)],
    }


def graph_from_dict(data: Dict[str, object]) -> CausalGraph:
    if "nodes" not in data:
        raise ValueError("graph JSON needs a 'nodes' list")
    nodes = [str(x) for x in data["nodes"]]  # type: ignore[attr-defined]
    directed: List[List[int]] = list(data.get("directed", []))  # type: ignore[call-overload]
    undirected: List[List[int]] = list(data.get("undirected", []))  # type: ignore[call-overload]
    for edge in [*directed, *undirected]:
        if len(edge) != 2:
            raise ValueError(f"graph JSON edge must be a pair, got {edge!r}")
    return CausalGraph(
        len(nodes),
        frozenset((int(a), int(b)) for a, b in directed),
        frozenset((int(a), int(b)) for a, b in undirected),
        tuple(nodes),
    )


def read_graph_json(path: str | Path) -> CausalGraph:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"graph file not found: {p}")
    return graph_from_dict(json.loads(p.read_text(encoding="utf-8")))


def write_graph_json(graph: CausalGraph, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(graph_to_dict(graph), indent=2) + "\n", encoding="utf-8")
    return p
