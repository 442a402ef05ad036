"""Dendrograms and exact evaluators for the three HC objectives.

A dendrogram node is either a leaf (an ``int`` vertex id) or an internal
node, represented as a 2-tuple ``(left, right)`` of nodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graphs import WeightedGraph, total_weight

__all__ = [
    "Dendrogram",
    "leaves_of",
    "left_leaning_tree",
    "lca_sizes",
    "dasgupta_cost",
    "similarity_reward",
    "dissimilarity_reward",
    "triplet_nonleaf_decomposition",
]

Node = "int | tuple"


def leaves_of(node) -> list[int]:
    """Leaf ids under ``node`` in left-to-right order."""
    if isinstance(node, (int, np.integer)):
        return [int(node)]
    out: list[int] = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, (int, np.integer)):
            out.append(int(cur))
        else:
            stack.append(cur[1])
            stack.append(cur[0])
    return out


def left_leaning_tree(ids) -> "int | tuple":
    """Caterpillar over ``ids``: (((a,b),c),d)..."""
    ids = list(ids)
    if not ids:
        raise ValueError("need at least one leaf")
    node = ids[0]
    for x in ids[1:]:
        node = (node, x)
    return node


@dataclass(frozen=True)
class Dendrogram:
    """Rooted binary tree whose leaves biject to vertices 0..n-1."""

    root: "int | tuple"
    n: int

    def __post_init__(self):
        seen = leaves_of(self.root)
        if sorted(seen) != list(range(self.n)):
            raise ValueError("dendrogram leaves must biject to 0..n-1")
        _check_binary(self.root)

    @classmethod
    def from_root(cls, root) -> "Dendrogram":
        return cls(root, len(leaves_of(root)))

    def leaf_counts(self) -> dict[int, int]:
        """Leaf count per node, keyed by node identity (cache for traversals)."""
        counts: dict[int, int] = {}

        def rec(node) -> int:
            if isinstance(node, (int, np.integer)):
                return 1
            c = rec(node[0]) + rec(node[1])
            counts[id(node)] = c
            return c

        rec(self.root)
        return counts

    def to_json(self) -> str:
        return json.dumps(_node_to_obj(self.root))

    @classmethod
    def from_json(cls, text: str) -> "Dendrogram":
        return cls.from_root(_obj_to_node(json.loads(text)))


def _check_binary(node):
    if isinstance(node, (int, np.integer)):
        return
    if not (isinstance(node, tuple) and len(node) == 2):
        raise ValueError(f"internal node must have exactly two children: {node!r}")
    _check_binary(node[0])
    _check_binary(node[1])


def _node_to_obj(node):
    if isinstance(node, (int, np.integer)):
        return {"leaf": int(node)}
    return {"children": [_node_to_obj(node[0]), _node_to_obj(node[1])]}


def _obj_to_node(obj):
    if "leaf" in obj:
        return int(obj["leaf"])
    a, b = obj["children"]
    return (_obj_to_node(a), _obj_to_node(b))


def lca_sizes(t: Dendrogram) -> np.ndarray:
    """Matrix of leaf counts of the lowest common ancestor, per pair.

    Symmetric, zero diagonal; entries lie in [2, n] for i != j.
    """
    m = np.zeros((t.n, t.n), dtype=np.int64)

    def rec(node) -> np.ndarray:
        if isinstance(node, (int, np.integer)):
            return np.array([int(node)])
        a = rec(node[0])
        b = rec(node[1])
        size = len(a) + len(b)
        m[np.ix_(a, b)] = size
        m[np.ix_(b, a)] = size
        return np.concatenate([a, b])

    rec(t.root)
    return m


def _weighted_lca_sum(g: WeightedGraph, t: Dendrogram) -> float:
    """sum over pairs of w_ij * |T_ij| (the dissimilarity / Dasgupta sum)."""
    if g.n != t.n:
        raise ValueError(f"graph has {g.n} vertices but tree has {t.n} leaves")
    w = g.matrix
    acc = 0.0

    def rec(node) -> np.ndarray:
        nonlocal acc
        if isinstance(node, (int, np.integer)):
            return np.array([int(node)])
        a = rec(node[0])
        b = rec(node[1])
        acc += (len(a) + len(b)) * w[np.ix_(a, b)].sum()
        return np.concatenate([a, b])

    rec(t.root)
    return float(acc)


def dasgupta_cost(g: WeightedGraph, t: Dendrogram) -> float:
    """sum w_ij * |T_ij| over pairs, minimized by good similarity trees."""
    return _weighted_lca_sum(g, t)


def dissimilarity_reward(g: WeightedGraph, t: Dendrogram) -> float:
    """sum w_ij * |T_ij| over pairs, maximized for dissimilarity weights."""
    return _weighted_lca_sum(g, t)


def similarity_reward(g: WeightedGraph, t: Dendrogram) -> float:
    """sum w_ij * (n - |T_ij|) over pairs, maximized for similarity weights."""
    return g.n * total_weight(g) - _weighted_lca_sum(g, t)


def triplet_nonleaf_decomposition(g: WeightedGraph, t: Dendrogram) -> float:
    """Triplet form of the similarity reward.

    sum over edges (i,j) and third vertices k of w_ij * 1{k is not a leaf of
    T_ij}; algebraically identical to :func:`similarity_reward`.
    """
    if g.n != t.n:
        raise ValueError(f"graph has {g.n} vertices but tree has {t.n} leaves")
    # leaf set of T_ij for every pair, gathered bottom-up
    members: dict[tuple[int, int], frozenset[int]] = {}

    def rec(node) -> frozenset[int]:
        if isinstance(node, (int, np.integer)):
            return frozenset([int(node)])
        a = rec(node[0])
        b = rec(node[1])
        both = a | b
        for i in a:
            for j in b:
                members[(min(i, j), max(i, j))] = both
        return both

    rec(t.root)
    acc = 0.0
    for (i, j), w in g.weights.items():
        cluster = members[(i, j)]
        for k in range(g.n):
            if k != i and k != j and k not in cluster:
                acc += w
    return acc
