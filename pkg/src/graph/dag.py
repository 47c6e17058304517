from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Set, Tuple

Edge = Tuple[int, int]
PairState = Literal["none", "fwd", "bwd", "undirected"]


class CycleError(ValueError):
    """Directed cycle found where an acyclic graph was required."""

    def __init__(self, cycle: List[int]) -> None:
        self.cycle = list(cycle)
        path = " -> ".join(str(v) for v in [*self.cycle, self.cycle[0]]) if self.cycle else ""
        super().__init__(f"graph has a directed cycle: {path}")


def _default_labels(n: int) -> Tuple[str, ...]:
    return tuple(f"X{i + 1}" for i in range(n))


@dataclass(frozen=True)
class CausalGraph:
    """Mixed graph over nodes 0..n_nodes-1.

    ``directed`` holds (source, target) pairs. ``undirected`` holds (low, high) pairs and is
    nonempty only for CPDAGs. A node pair appears in at most one of the two sets, in at most
    one direction.
    """

    n_nodes: int
    directed: FrozenSet[Edge] = field(default_factory=frozenset)
    undirected: FrozenSet[Edge] = field(default_factory=frozenset)
    labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = int(self.n_nodes)
        if n < 0:
            raise ValueError(f"n_nodes must be >= 0, got {n}")
        directed = frozenset((int(a), int(b)) for a, b in self.directed)
        undirected = frozenset(
            (min(int(a), int(b)), max(int(a), int(b))) for a, b in self.undirected
        )
        seen: Set[Edge] = set()
        for a, b in [*directed, *undirected]:
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) out of range for {n} nodes")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"node pair {key} carries more than one edge")
            seen.add(key)
        labels = tuple(str(x) for x in self.labels) if self.labels else _default_labels(n)
        if len(labels) != n:
            raise ValueError(f"expected {n} labels, got {len(labels)}")
        object.__setattr__(self, "n_nodes", n)
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "undirected", undirected)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def empty(cls, n: int, labels: Optional[Iterable[str]] = None) -> CausalGraph:
        return cls(n, labels=tuple(labels) if labels is not None else ())

    @property
    def is_fully_directed(self) -> bool:
        return not self.undirected

    @property
    def n_edges(self) -> int:
        return len(self.directed) + len(self.undirected)

    def _check_node(self, node: int) -> None:
        if not 0 <= node < self.n_nodes:
            raise ValueError(f"node {node} out of range for {self.n_nodes} nodes")

    def parents(self, node: int) -> FrozenSet[int]:
        self._check_node(node)
        return frozenset(a for a, b in self.directed if b == node)

    def children(self, node: int) -> FrozenSet[int]:
        self._check_node(node)
        return frozenset(b for a, b in self.directed if a == node)

    def neighbors(self, node: int) -> FrozenSet[int]:
        """Nodes joined to ``node`` by an undirected edge."""
        self._check_node(node)
        return frozenset(b if a == node else a for a, b in self.undirected if node in (a, b))

    def adjacent(self, node: int) -> FrozenSet[int]:
        return self.parents(node) | self.children(node) | self.neighbors(node)

    def is_adjacent(self, i: int, j: int) -> bool:
        return self.pair_state(i, j) != "none"

    def pair_state(self, i: int, j: int) -> PairState:
        """Edge between i and j as seen from i: fwd means i -> j."""
        if (i, j) in self.directed:
            return "fwd"
        if (j, i) in self.directed:
            return "bwd"
        if (min(i, j), max(i, j)) in self.undirected:
            return "undirected"
        return "none"

    def skeleton(self) -> FrozenSet[Edge]:
        return frozenset((min(a, b), max(a, b)) for a, b in self.directed) | self.undirected

    def v_structures(self) -> FrozenSet[Tuple[int, int, int]]:
        """Triples (i, k, j) with i < j, i -> k <- j and i, j non-adjacent."""
        out: Set[Tuple[int, int, int]] = set()
        for k in range(self.n_nodes):
            pa = sorted(self.parents(k))
            for x in range(len(pa)):
                for y in range(x + 1, len(pa)):
                    i, j = pa[x], pa[y]
                    if not self.is_adjacent(i, j):
                        out.add((i, k, j))
        return frozenset(out)

    def parent_map(self) -> Dict[int, List[int]]:
        pm: Dict[int, List[int]] = {v: [] for v in range(self.n_nodes)}
        for a, b in sorted(self.directed):
            pm[b].append(a)
        return pm

    def with_labels(self, labels: Iterable[str]) -> CausalGraph:
        return CausalGraph(self.n_nodes, self.directed, self.undirected, tuple(labels))


def parents(dag: CausalGraph, node: int) -> FrozenSet[int]:
    return dag.parents(node)


def find_cycle(graph: CausalGraph) -> Optional[List[int]]:
    """One directed cycle among ``graph.directed``, or None."""
    pm = graph.parent_map()
    indeg = {v: len(pm[v]) for v in range(graph.n_nodes)}
    children: Dict[int, List[int]] = {v: [] for v in range(graph.n_nodes)}
    for a, b in graph.directed:
        children[a].append(b)
    ready = [v for v, d in indeg.items() if d == 0]
    removed: Set[int] = set()
    while ready:
        v = ready.pop()
        removed.add(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    left = sorted(set(range(graph.n_nodes)) - removed)
    if not left:
        return None
    # every remaining node keeps a remaining parent; walk parents until a repeat
    path: List[int] = []
    pos: Dict[int, int] = {}
    v = left[0]
    while v not in pos:
        pos[v] = len(path)
        path.append(v)
        v = min(p for p in pm[v] if p not in removed)
    cycle = path[pos[v]:]
    cycle.reverse()
    return cycle


def is_acyclic(graph: CausalGraph) -> bool:
    return find_cycle(graph) is None


def topological_order(dag: CausalGraph) -> List[int]:
    """Kahn ordering; among ready nodes the lowest index goes first."""
    if dag.undirected:
        raise ValueError(
            "topological order needs a fully directed graph, "
            f"found {len(dag.undirected)} undirected edges"
        )
    pm = dag.parent_map()
    indeg = [len(pm[v]) for v in range(dag.n_nodes)]
    children: Dict[int, List[int]] = {v: [] for v in range(dag.n_nodes)}
    for a, b in dag.directed:
        children[a].append(b)
    heap = [v for v in range(dag.n_nodes) if indeg[v] == 0]
    heapq.heapify(heap)
    order: List[int] = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    if len(order) != dag.n_nodes:
        cycle = find_cycle(dag)
        raise CycleError(cycle or [])
    return order


def enumerate_dags(n: int) -> List[CausalGraph]:
    """Every labelled DAG on n nodes (543 for n=4), for exhaustive checks on tiny graphs."""
    if n > 5:
        raise ValueError(f"enumerate_dags is limited to n <= 5, got {n}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out: List[CausalGraph] = []
    for code in range(3 ** len(pairs)):
        edges: Set[Edge] = set()
        c = code
        for i, j in pairs:
            c, r = divmod(c, 3)
            if r == 1:
                edges.add((i, j))
            elif r == 2:
                edges.add((j, i))
        g = CausalGraph(n, frozenset(edges))
        if is_acyclic(g):
            out.append(g)
    return out
