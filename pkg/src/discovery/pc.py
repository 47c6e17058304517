from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from graph import CausalGraph, consistent_extension

from .ci import CiTestResult, PcConfig, correlation_matrix, fisher_z_from_corr

logger = logging.getLogger("run")

Pair = Tuple[int, int]


@dataclass(frozen=True)
class SkeletonResult:
    skeleton: CausalGraph
    sepsets: Dict[Pair, Tuple[int, ...]]
    trace: Tuple[CiTestResult, ...]
    flags: Tuple[str, ...] = ()


@dataclass(frozen=True)
class OrientResult:
    cpdag: CausalGraph
    flags: Tuple[str, ...] = ()


@dataclass(frozen=True)
class DiscoveryResult:
    dag: CausalGraph
    cpdag: CausalGraph
    sepsets: Dict[Pair, Tuple[int, ...]] = field(default_factory=dict)
    trace: Tuple[CiTestResult, ...] = ()
    flags: Tuple[str, ...] = ()


def _as_data(data: np.ndarray) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"data must be a 2-D matrix, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contains non-finite values")
    return x


def pc_skeleton(
    data: np.ndarray, config: PcConfig, labels: Optional[Sequence[str]] = None
) -> SkeletonResult:
    """Order-independent (stable) PC adjacency search.

    Each level l conditions on subsets of size l drawn from the adjacencies frozen at the start
    of the level. Pairs are visited in ascending order; subsets come from adj(i) \\ {j} then
    adj(j) \\ {i}, each in lexicographic order. The first independent test removes the edge and
    records its separating set.
    """
    x = _as_data(data)
    n, m = x.shape
    if m < 2:
        raise ValueError(f"pc_skeleton needs at least 2 columns, got {m}")
    corr = correlation_matrix(x)
    adj: Dict[int, Set[int]] = {v: set(range(m)) - {v} for v in range(m)}
    sepsets: Dict[Pair, Tuple[int, ...]] = {}
    trace: List[CiTestResult] = []
    flags: List[str] = []
    done: Dict[Tuple[int, int, Tuple[int, ...]], CiTestResult] = {}

    # deepest level the sample size supports
    depth_cap = min(config.max_depth, max(-1, n - 4))
    level = 0
    while level <= depth_cap:
        snapshot = {v: frozenset(adj[v]) for v in adj}
        testable = False
        for i in range(m):
            for j in range(i + 1, m):
                if j not in adj[i]:
                    continue
                removed = False
                for a, b in ((i, j), (j, i)):
                    cands = sorted(snapshot[a] - {b})
                    if len(cands) < level:
                        continue
                    testable = True
                    for cond in combinations(cands, level):
                        key = (i, j, cond)
                        res = done.get(key)
                        if res is None:
                            res = fisher_z_from_corr(
                                corr, n, i, j, cond, config.alpha, config.rho_clamp
                            )
                            done[key] = res
                            trace.append(res)
                            if res.singular:
                                given = ",".join(map(str, cond))
                                flags.append(f"singular-correlation {i}-{j}|{given}")
                        if res.independent:
                            adj[i].discard(j)
                            adj[j].discard(i)
                            sepsets[(i, j)] = cond
                            removed = True
                            break
                    if removed:
                        break
        n_edges = sum(len(v) for v in adj.values()) // 2
        logger.debug("PC LEVEL depth=%d edges=%d tests=%d", level, n_edges, len(trace))
        if not testable:
            break
        level += 1

    edges = frozenset((i, j) for i in range(m) for j in adj[i] if i < j)
    skeleton = CausalGraph(m, undirected=edges, labels=tuple(labels) if labels is not None else ())
    for f in flags:
        logger.warning("PC FLAG %s", f)
    return SkeletonResult(skeleton, sepsets, tuple(trace), tuple(flags))


class _Marks:
    """Mutable directed/undirected edge sets used while orienting."""

    def __init__(self, n: int, undirected: FrozenSet[Pair]) -> None:
        self.n = n
        self.directed: Set[Pair] = set()
        self.undirected: Set[Pair] = set(undirected)
        # conflicted edges stay undirected through the Meek closure
        self.frozen: Set[Pair] = set()

    def adjacent(self, a: int, b: int) -> bool:
        return (
            (a, b) in self.directed
            or (b, a) in self.directed
            or (min(a, b), max(a, b)) in self.undirected
        )

    def is_undirected(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.undirected

    def orient(self, a: int, b: int) -> None:
        self.undirected.discard((min(a, b), max(a, b)))
        self.directed.add((a, b))

    def undirected_pairs(self) -> List[Pair]:
        return sorted(self.undirected - self.frozen)


def _neighbors(skel: FrozenSet[Pair], n: int) -> Dict[int, Set[int]]:
    nb: Dict[int, Set[int]] = {v: set() for v in range(n)}
    for a, b in skel:
        nb[a].add(b)
        nb[b].add(a)
    return nb


def _meek_once(g: _Marks) -> bool:
    """Apply the first Meek rule that fires anywhere; True when an edge was oriented."""
    for a, b in g.undirected_pairs():
        for x, y in ((a, b), (b, a)):
            # R1: z -> x - y with z, y non-adjacent
            if any(z != y and not g.adjacent(z, y) for z, t in g.directed if t == x):
                g.orient(x, y)
                return True
            # R2: x -> z -> y
            if any((x, z) in g.directed and (z, y) in g.directed for z in range(g.n)):
                g.orient(x, y)
                return True
            # R3: x - z -> y and x - w -> y with z, w non-adjacent
            mids = [z for z in range(g.n) if g.is_undirected(x, z) and (z, y) in g.directed]
            if any(not g.adjacent(z, w) for z, w in combinations(mids, 2)):
                g.orient(x, y)
                return True
            # R4: x - w -> z -> y with x adjacent z and w, y non-adjacent
            for w in range(g.n):
                if not g.is_undirected(x, w) or g.adjacent(w, y):
                    continue
                if any(
                    (w, z) in g.directed and (z, y) in g.directed and g.adjacent(x, z)
                    for z in range(g.n)
                ):
                    g.orient(x, y)
                    return True
    return False


def orient(
    skeleton: CausalGraph,
    sepsets: Dict[Pair, Tuple[int, ...]],
) -> OrientResult:
    """Collider orientation of unshielded triples followed by Meek rules 1-4 to closure.

    Conflicting collider proposals (both directions forced) leave the edge undirected and are
    reported in ``flags``.
    """
    n = skeleton.n_nodes
    skel = skeleton.skeleton()
    nb = _neighbors(skel, n)
    proposals: Dict[Pair, Set[Pair]] = {}
    for k in range(n):
        for i, j in combinations(sorted(nb[k]), 2):
            if j in nb[i]:
                continue
            sep = sepsets.get((min(i, j), max(i, j)))
            if sep is None or k in sep:
                continue
            for src in (i, j):
                key = (min(src, k), max(src, k))
                proposals.setdefault(key, set()).add((src, k))

    g = _Marks(n, skel)
    flags: List[str] = []
    for key in sorted(proposals):
        dirs = proposals[key]
        if len(dirs) > 1:
            flags.append(f"orientation-conflict {key[0]}-{key[1]}")
            g.frozen.add(key)
            continue
        (src, dst), = dirs
        g.orient(src, dst)

    while _meek_once(g):
        pass

    for f in flags:
        logger.warning("PC FLAG %s", f)
    cpdag = CausalGraph(n, frozenset(g.directed), frozenset(g.undirected), skeleton.labels)
    return OrientResult(cpdag, tuple(flags))


def discover(
    data: np.ndarray, config: PcConfig, labels: Optional[Sequence[str]] = None
) -> DiscoveryResult:
    """PC skeleton, orientation and consistent extension of a numerically encoded data matrix."""
    x = _as_data(data)
    if x.shape[0] == 0:
        raise ValueError("discover needs at least one row")
    m = x.shape[1]
    lab = tuple(labels) if labels is not None else ()
    if m < 2:
        empty = CausalGraph(m, labels=lab)
        return DiscoveryResult(empty, empty)

    sk = pc_skeleton(x, config, labels=labels)
    oriented = orient(sk.skeleton, sk.sepsets)
    ext = consistent_extension(oriented.cpdag)
    flags = [*sk.flags, *oriented.flags]
    if not ext.consistent:
        flags.append("inconsistent-extension")
    logger.debug(
        "PC DONE nodes=%d skeleton=%d directed=%d undirected=%d flags=%d",
        m,
        len(sk.skeleton.undirected),
        len(oriented.cpdag.directed),
        len(oriented.cpdag.undirected),
        len(flags),
    )
    return DiscoveryResult(ext.dag, oriented.cpdag, dict(sk.sepsets), sk.trace, tuple(flags))


def ci_trace_frame(result: DiscoveryResult) -> pd.DataFrame:
    rows = [
        {
            "i": t.i,
            "j": t.j,
            "cond_set": ";".join(str(c) for c in t.cond),
            "statistic": t.statistic,
            "p": t.p_value,
            "independent": t.independent,
        }
        for t in result.trace
    ]
    return pd.DataFrame(rows, columns=["i", "j", "cond_set", "statistic", "p", "independent"])


def write_ci_trace(result: DiscoveryResult, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    ci_trace_frame(result).to_csv(p, index=False)
    return p
