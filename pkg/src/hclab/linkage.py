"""Average-linkage agglomerative clustering in similarity and dissimilarity modes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import (
    WeightedGraph,
    make_tight_dissimilarity_instance,
    make_tight_similarity_instance,
    total_weight,
)
from .trees import Dendrogram, dissimilarity_reward, left_leaning_tree, similarity_reward

__all__ = [
    "MergeStep",
    "average_linkage",
    "linkage_ratio_report",
    "average_linkage_closed_form_dissimilarity",
    "dissimilarity_tight_report",
    "similarity_tight_report",
    "vertical_first_tree",
    "top_cut_tree",
]

PERTURB_SCALE = 1e-9


@dataclass(frozen=True)
class MergeStep:
    """One merge of the trace: clusters are identified by their minimum vertex id."""

    step: int
    cluster_a: int
    cluster_b: int
    size_a: int
    size_b: int
    average: float


def average_linkage(
    g: WeightedGraph,
    mode: str = "similarity",
    tie_break: str = "lexicographic",
    seed: int = 0,
) -> tuple[Dendrogram, list[MergeStep]]:
    """Agglomerate by extremal average inter-cluster weight.

    similarity mode merges the pair with the largest average weight,
    dissimilarity mode the smallest.  The average of (A, B) is
    sum_{a in A, b in B} w_ab / (|A| |B|), maintained through exact sum and
    size updates (sums add, sizes add) rather than averaged averages.

    tie_break "lexicographic" resolves equal averages by (min cluster id,
    next cluster id), where a cluster's id is its minimum vertex;
    "perturb" first jitters the nonzero weights multiplicatively
    (zero weights stay exactly tied) and then falls back to the
    lexicographic rule.
    """
    if mode not in ("similarity", "dissimilarity"):
        raise ValueError(f"unknown mode {mode!r}")
    if tie_break not in ("lexicographic", "perturb"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    n = g.n
    if n == 1:
        return Dendrogram(0, 1), []

    s = g.matrix.copy()
    if tie_break == "perturb":
        rng = np.random.default_rng(seed)
        jitter = 1.0 + PERTURB_SCALE * rng.random((n, n))
        jitter = np.triu(jitter, 1)
        jitter = jitter + jitter.T
        s = s * jitter

    sizes = np.ones(n, dtype=np.int64)
    nodes: list = list(range(n))
    active = np.ones(n, dtype=bool)
    true_sums = g.matrix.copy()  # unperturbed, for reported averages

    trace: list[MergeStep] = []
    for step in range(n - 1):
        avg = s / np.outer(sizes, sizes)
        idx = np.where(active)[0]
        sub = avg[np.ix_(idx, idx)].copy()
        iu = np.triu_indices(len(idx), k=1)
        cand = sub[iu]
        if mode == "similarity":
            best = cand.max()
        else:
            best = cand.min()
        # lexicographic tie-break: first hit in row-major upper-triangular
        # order over ascending cluster ids
        hit = int(np.flatnonzero(cand == best)[0])
        a = int(idx[iu[0][hit]])
        b = int(idx[iu[1][hit]])

        true_avg = float(true_sums[a, b] / (sizes[a] * sizes[b]))
        trace.append(
            MergeStep(step, a, b, int(sizes[a]), int(sizes[b]), true_avg)
        )
        nodes[a] = (nodes[a], nodes[b])
        s[a, :] += s[b, :]
        s[:, a] += s[:, b]
        true_sums[a, :] += true_sums[b, :]
        true_sums[:, a] += true_sums[:, b]
        s[a, a] = 0.0
        true_sums[a, a] = 0.0
        sizes[a] += sizes[b]
        active[b] = False

    root = nodes[int(np.flatnonzero(active)[0])]
    return Dendrogram(root, n), trace


def average_linkage_closed_form_dissimilarity(m: int) -> float:
    """Exact average-linkage value on K_{m,m} minus a perfect matching.

    After the m zero-weight matched pairs merge, the remainder is a uniform
    clique on m supernodes of size 2 with pairwise weight 2, whose value is
    order-independent: 4 m (m+1) (m-1) / 3.
    """
    return 4.0 * (m + 1) * m * (m - 1) / 3.0


def vertical_first_tree(k: int) -> Dendrogram:
    """Reference tree for the tight similarity instance.

    Merges each unit-weight vertical clique bottom-up first, then chains the
    clique subtrees together.
    """
    cliques = [left_leaning_tree(range(c * k * k, (c + 1) * k * k)) for c in range(k)]
    return Dendrogram.from_root(left_leaning_tree(cliques))


def top_cut_tree(m: int) -> Dendrogram:
    """Reference tree for the tight dissimilarity instance: cut (L, R) first."""
    left = left_leaning_tree(range(0, 2 * m, 2))
    right = left_leaning_tree(range(1, 2 * m, 2))
    return Dendrogram.from_root((left, right))


def linkage_ratio_report(size: int, objective: str) -> tuple[float, float, float]:
    """(alg value, reference, ratio) on the tight instance for this objective.

    objective "similarity" takes size = k (clique side length, n = k^3) and
    compares against the vertical-first tree; "dissimilarity" takes size = m
    (matching size, n = 2m) and compares against n * W.
    """
    if objective == "similarity":
        return similarity_tight_report(size)
    if objective == "dissimilarity":
        return dissimilarity_tight_report(size)
    raise ValueError(f"unknown objective {objective!r}")


def similarity_tight_report(k: int, eps: float = 0.1) -> tuple[float, float, float]:
    """(average-linkage value, vertical-first lower bound, ratio) at size k."""
    g = make_tight_similarity_instance(k, eps)
    tree, _ = average_linkage(g, mode="similarity")
    alg = similarity_reward(g, tree)
    ref = similarity_reward(g, vertical_first_tree(k))
    return alg, ref, alg / ref


def dissimilarity_tight_report(m: int) -> tuple[float, float, float]:
    """(average-linkage value, n*W reference, ratio) at matching size m."""
    g = make_tight_dissimilarity_instance(m)
    tree, _ = average_linkage(g, mode="dissimilarity")
    alg = dissimilarity_reward(g, tree)
    ref = g.n * total_weight(g)
    return alg, ref, alg / ref
