from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Set

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .dag import CausalGraph, Edge, topological_order

logger = logging.getLogger("run")


class NoConsistentExtensionError(ValueError):
    """The partially directed graph admits no DAG with the same skeleton and v-structures."""


@dataclass(frozen=True)
class ExtensionResult:
    dag: CausalGraph
    consistent: bool


def _sink_candidate(x: int, alive: Set[int], directed: Set[Edge], undirected: Set[Edge]) -> bool:
    if any(a == x and b in alive for a, b in directed):
        return False
    touching = (b if a == x else a for a, b in undirected if x in (a, b))
    und_nb = {y for y in touching if y in alive}
    adj = und_nb | {a for a, b in directed if b == x and a in alive}
    for y in und_nb:
        for z in adj:
            if z == y:
                continue
            if not _adjacent(y, z, directed, undirected):
                return False
    return True


def _adjacent(a: int, b: int, directed: Set[Edge], undirected: Set[Edge]) -> bool:
    return (a, b) in directed or (b, a) in directed or (min(a, b), max(a, b)) in undirected


def _fallback(graph: CausalGraph) -> CausalGraph:
    """Acyclic orientation that keeps as many marks as it can without a consistency guarantee."""
    n = graph.n_nodes
    if graph.directed and n:
        rows, cols = zip(*graph.directed)
        adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        _, comp = connected_components(adj, directed=True, connection="strong")
    else:
        comp = np.arange(n)
    directed: Set[Edge] = set()
    for a, b in graph.directed:
        if comp[a] == comp[b]:
            directed.add((min(a, b), max(a, b)))
        else:
            directed.add((a, b))
    order = topological_order(CausalGraph(n, frozenset(directed)))
    pos: Dict[int, int] = {v: k for k, v in enumerate(order)}
    for a, b in graph.undirected:
        directed.add((a, b) if pos[a] < pos[b] else (b, a))
    return CausalGraph(n, frozenset(directed), labels=graph.labels)


def consistent_extension(cpdag: CausalGraph) -> ExtensionResult:
    """Orient every undirected edge without adding v-structures or cycles.

    Repeatedly removes a sink x whose undirected neighbours are adjacent to all of x's other
    neighbours, orienting those undirected edges into x. Among candidate sinks the highest index
    is removed first, so ties resolve toward low -> high orientation (0 - 1 becomes 0 -> 1).
    When no candidate exists the graph falls back to an acyclic orientation and
    ``consistent`` is False.
    """
    if not cpdag.undirected:
        try:
            topological_order(cpdag)
            return ExtensionResult(cpdag, True)
        except ValueError:
            logger.warning("EXTENSION FALLBACK reason=directed-cycle")
            return ExtensionResult(_fallback(cpdag), False)

    directed: Set[Edge] = set(cpdag.directed)
    undirected: Set[Edge] = set(cpdag.undirected)
    alive: Set[int] = set(range(cpdag.n_nodes))
    oriented: Set[Edge] = set(cpdag.directed)
    while alive:
        candidates = [x for x in alive if _sink_candidate(x, alive, directed, undirected)]
        if not candidates:
            logger.warning("EXTENSION FALLBACK reason=no-sink remaining=%d", len(alive))
            return ExtensionResult(_fallback(cpdag), False)
        x = max(candidates)
        for a, b in list(undirected):
            if x in (a, b):
                y = b if a == x else a
                if y in alive:
                    oriented.add((y, x))
                    undirected.discard((a, b))
        alive.discard(x)
    dag = CausalGraph(cpdag.n_nodes, frozenset(oriented), labels=cpdag.labels)
    return ExtensionResult(dag, True)


def cpdag_to_dag(cpdag: CausalGraph, strict: bool = False) -> CausalGraph:
    result = consistent_extension(cpdag)
    if strict and not result.consistent:
        raise NoConsistentExtensionError("no consistent DAG extension exists for this graph")
    return result.dag
