"""Weighted graphs, worst-case instance generators, and JSON graph files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GraphFormatError",
    "WeightedGraph",
    "total_weight",
    "make_tight_similarity_instance",
    "make_tight_dissimilarity_instance",
    "make_embedded_clique_instance",
    "make_random_instance",
    "read_graph",
    "write_graph",
    "graph_to_json",
    "induced_subgraph",
]


class GraphFormatError(ValueError):
    """Raised for malformed graph files or inconsistent edge lists."""


@dataclass
class WeightedGraph:
    """Symmetric nonnegative pairwise weights over vertices ``0..n-1``.

    Absent pairs have weight zero.  Whether the weights are similarities or
    dissimilarities is contextual and decided by the caller.  Instances are
    treated as immutable after construction; the dense matrix view is cached
    on first use and must not be written to.
    """

    n: int
    weights: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        self.n = int(self.n)
        canon: dict[tuple[int, int], float] = {}
        for (i, j), w in self.weights.items():
            i, j = int(i), int(j)
            if i == j:
                raise GraphFormatError(f"self-loop on vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphFormatError(f"edge ({i},{j}) outside vertex range 0..{self.n - 1}")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise GraphFormatError(f"edge ({i},{j}) has invalid weight {w}")
            key = (i, j) if i < j else (j, i)
            if key in canon and canon[key] != w:
                raise GraphFormatError(f"conflicting symmetric entries for pair {key}")
            if w != 0.0:
                canon[key] = w
        self.weights = canon
        self._matrix: np.ndarray | None = None

    @property
    def matrix(self) -> np.ndarray:
        """Dense symmetric weight matrix (zero diagonal). Do not mutate."""
        if self._matrix is None:
            m = np.zeros((self.n, self.n))
            for (i, j), w in self.weights.items():
                m[i, j] = m[j, i] = w
            self._matrix = m
        return self._matrix

    def weight(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        return self.weights.get(key, 0.0)

    def edges(self):
        """Nonzero edges as (i, j, w) with i < j, sorted."""
        for (i, j) in sorted(self.weights):
            yield i, j, self.weights[(i, j)]

    def __eq__(self, other):
        return (
            isinstance(other, WeightedGraph)
            and self.n == other.n
            and self.weights == other.weights
        )


def total_weight(g: WeightedGraph) -> float:
    """Sum of weights over unordered pairs."""
    return float(sum(g.weights.values()))


def make_tight_similarity_instance(k: int, eps: float = 0.1) -> WeightedGraph:
    """Worst case for average-linkage under the similarity objective.

    ``k`` vertical cliques on ``k**2`` vertices each (unit weight), plus
    ``k**2`` horizontal cliques of weight ``1 + eps`` joining same-index
    vertices across the vertical cliques; ``n = k**3``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = k**3
    w: dict[tuple[int, int], float] = {}
    # vertex id = clique * k^2 + index
    for c in range(k):
        base = c * k * k
        for p in range(k * k):
            for q in range(p + 1, k * k):
                w[(base + p, base + q)] = 1.0
    for p in range(k * k):
        for c1 in range(k):
            for c2 in range(c1 + 1, k):
                w[(c1 * k * k + p, c2 * k * k + p)] = 1.0 + eps
    return WeightedGraph(n, w)


def make_tight_dissimilarity_instance(m: int) -> WeightedGraph:
    """Complete bipartite K_{m,m} minus a perfect matching, unit weights.

    Vertices are labelled so that matched pairs are adjacent ids
    ``(2t, 2t+1)``: one side is the even ids, the other the odd ids.  Any
    perfect matching is equivalent by symmetry; this labelling makes the
    zero-weight matched pairs come first in lexicographic tie-break order.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    n = 2 * m
    w: dict[tuple[int, int], float] = {}
    for u in range(n):
        for v in range(u + 1, n):
            if (u % 2) != (v % 2) and v != u ^ 1:
                w[(u, v)] = 1.0
    return WeightedGraph(n, w)


def make_embedded_clique_instance(n: int, eps: float) -> WeightedGraph:
    """Unit clique on the first ``ceil(eps*n)`` vertices, zero elsewhere."""
    if not (0 < eps <= 1):
        raise ValueError("eps must lie in (0, 1]")
    size = math.ceil(eps * n)
    if size < 2:
        raise ValueError(f"embedded clique would have {size} < 2 vertices")
    w = {(i, j): 1.0 for i in range(size) for j in range(i + 1, size)}
    return WeightedGraph(n, w)


def make_random_instance(
    n: int,
    density: float,
    weight_dist: str = "uniform01",
    seed: int = 0,
) -> WeightedGraph:
    """Erdos-Renyi style instance; each pair present with prob ``density``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not (0 < density <= 1):
        raise ValueError("density must lie in (0, 1]")
    if weight_dist not in ("uniform01", "unit"):
        raise ValueError(f"unknown weight_dist {weight_dist!r}")
    rng = np.random.default_rng(seed)
    w: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w[(i, j)] = 1.0 if weight_dist == "unit" else float(rng.random())
    return WeightedGraph(n, w)


def graph_to_json(g: WeightedGraph) -> str:
    """Graph JSON text: {"n": n, "edges": [[i, j, w], ...]} with i < j."""
    return json.dumps({"n": g.n, "edges": [[i, j, w] for i, j, w in g.edges()]})


def write_graph(g: WeightedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(graph_to_json(g))
        fh.write("\n")


def read_graph(path) -> WeightedGraph:
    """Read a graph JSON file, validating symmetry and nonnegativity."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed graph file {path}: {exc}") from exc
    if not isinstance(payload, dict) or "n" not in payload or "edges" not in payload:
        raise GraphFormatError(f"graph file {path} must contain 'n' and 'edges'")
    n = payload["n"]
    seen: dict[tuple[int, int], float] = {}
    for entry in payload["edges"]:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 3):
            raise GraphFormatError(f"bad edge entry {entry!r}")
        i, j, w = entry
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(
                f"duplicate entries for pair {key}"
                + ("" if seen[key] == w else " with conflicting weights")
            )
        seen[key] = w
    return WeightedGraph(n, {k: float(v) for k, v in seen.items()})


def induced_subgraph(g: WeightedGraph, vertices) -> tuple[WeightedGraph, list[int]]:
    """Subgraph on ``vertices`` reindexed to 0..len-1; returns (graph, ids).

    ``ids[new] = original vertex id``.
    """
    ids = sorted(int(v) for v in vertices)
    pos = {v: i for i, v in enumerate(ids)}
    w = {}
    for (i, j), wt in g.weights.items():
        if i in pos and j in pos:
            w[(pos[i], pos[j])] = wt
    return WeightedGraph(len(ids), w), ids
