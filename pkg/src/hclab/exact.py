"""Brute-force oracles: exhaustive tree enumeration and exact max-cut."""

from __future__ import annotations

import numpy as np

from .graphs import WeightedGraph
from .trees import Dendrogram

__all__ = [
    "iter_dendrograms",
    "count_dendrograms",
    "brute_force_opt",
    "brute_force_maxcut",
    "BRUTE_FORCE_MAX_N",
]

BRUTE_FORCE_MAX_N = 10


def _insertions(node, leaf):
    """All trees obtained by grafting ``leaf`` onto one edge of ``node``.

    The root edge comes first, then edges of the left subtree, then the
    right; the order is deterministic so witness trees are reproducible.
    """
    yield (node, leaf)
    if isinstance(node, tuple):
        left, right = node
        for sub in _insertions(left, leaf):
            yield (sub, right)
        for sub in _insertions(right, leaf):
            yield (left, sub)


def iter_dendrograms(n: int):
    """All (2n-3)!! leaf-labelled binary trees over 0..n-1, as root nodes."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        yield 0
        return

    def rec(m):
        if m == 2:
            yield (0, 1)
            return
        for smaller in rec(m - 1):
            yield from _insertions(smaller, m - 1)

    yield from rec(n)


def count_dendrograms(n: int) -> int:
    """(2n-3)!! for n >= 2, 1 for n = 1."""
    out = 1
    for k in range(2, n + 1):
        out *= 2 * k - 3
    return out


def _lca_weight_sum(node, w: np.ndarray) -> float:
    """sum of w_ij * |T_ij| over pairs for a raw tree node."""
    acc = 0.0

    def rec(nd):
        nonlocal acc
        if isinstance(nd, int):
            return [nd]
        a = rec(nd[0])
        b = rec(nd[1])
        acc += (len(a) + len(b)) * w[np.ix_(a, b)].sum()
        return a + b

    rec(node)
    return acc


def brute_force_opt(g: WeightedGraph, objective: str) -> tuple[Dendrogram, float]:
    """Global optimum over all binary leaf-labelled trees.

    objective: "dasgupta" (minimize), "similarity" or "dissimilarity"
    (maximize).  Ties go to the first tree in enumeration order.  Guarded to
    n <= 10; the enumeration has (2n-3)!! candidates.
    """
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got n = {g.n}")
    if objective not in ("dasgupta", "similarity", "dissimilarity"):
        raise ValueError(f"unknown objective {objective!r}")
    w = g.matrix
    n = g.n
    total = w.sum() / 2.0
    # dasgupta and similarity are both optimized by minimizing the LCA sum;
    # dissimilarity maximizes it.
    best_node = None
    best_sum = None
    want_max = objective == "dissimilarity"
    for node in iter_dendrograms(n):
        s = _lca_weight_sum(node, w) if n > 1 else 0.0
        if best_sum is None or (s > best_sum if want_max else s < best_sum):
            best_sum = s
            best_node = node
    tree = Dendrogram(best_node, n)
    if objective == "similarity":
        value = n * total - best_sum
    else:
        value = best_sum
    return tree, float(value)


def brute_force_maxcut(g: WeightedGraph) -> tuple[np.ndarray, float]:
    """Exact max-cut by subset enumeration (vertex 0 pinned to one side).

    Returns (side indicator array of length n, cut value).  Guarded to
    n <= 20 for memory reasons; intended for n <= 12 test instances.
    """
    n = g.n
    if n > 20:
        raise ValueError("exact max-cut enumeration limited to n <= 20")
    if n == 1:
        return np.zeros(1, dtype=np.int8), 0.0
    w = g.matrix
    masks = np.arange(2 ** (n - 1), dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n - 1)[None, :]) & 1).astype(np.float64)
    b = np.concatenate([np.zeros((len(masks), 1)), bits], axis=1)
    # ordered-pair sum b_i (1 - b_j) w_ij counts each cut edge exactly once
    vals = np.einsum("ti,ij,tj->t", b, w, 1.0 - b)
    best = int(np.argmax(vals))
    return b[best].astype(np.int8), float(vals[best])
