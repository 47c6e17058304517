from __future__ import annotations

from core.types import ShdMode

from .dag import CausalGraph


def shd(g1: CausalGraph, g2: CausalGraph, mode: ShdMode = "dag") -> int:
    """Structural Hamming distance: number of node pairs whose edge differs.

    With unit cost for adding, deleting or reversing one edge, every differing pair takes
    exactly one edit, so the pair count is the minimum edit distance. ``mode="dag"`` requires
    fully directed inputs; ``mode="cpdag"`` also compares undirected marks.
    """
    if g1.n_nodes != g2.n_nodes:
        raise ValueError(f"shd needs graphs over the same nodes: {g1.n_nodes} vs {g2.n_nodes}")
    if mode not in ("dag", "cpdag"):
        raise ValueError(f"unknown shd mode {mode!r}; expected 'dag' or 'cpdag'")
    if mode == "dag" and (g1.undirected or g2.undirected):
        raise ValueError("shd(mode='dag') needs fully directed graphs; use mode='cpdag' for CPDAGs")

    pairs = g1.skeleton() | g2.skeleton()
    return sum(1 for i, j in pairs if g1.pair_state(i, j) != g2.pair_state(i, j))
