"""Uniformly random recursive bipartition trees and their expectation checks."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .graphs import WeightedGraph, total_weight
from .trees import Dendrogram

__all__ = [
    "RngStream",
    "stream_rng",
    "random_always",
    "random_tree_node",
    "expected_similarity_reward_random",
    "expected_dissimilarity_reward_random",
    "exact_expected_dissimilarity_reward_random",
    "monte_carlo_mean",
    "monte_carlo_objective_samples",
    "triplet_nonleaf_frequencies",
]


@dataclass(frozen=True)
class RngStream:
    """A reproducible, labelled random stream derived from a master seed."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, self.stream]))


def stream_rng(seed: int, label: str) -> np.random.Generator:
    """Independent stream for a named component; stable across runs."""
    return RngStream(seed, zlib.crc32(label.encode())).generator()


def _proper_bipartition(ids: list[int], rng: np.random.Generator):
    """Uniform proper bipartition via per-vertex fair coins, resampled whole
    if one side would be empty."""
    while True:
        coins = rng.integers(0, 2, size=len(ids))
        if 0 < coins.sum() < len(ids):
            break
    left = [v for v, c in zip(ids, coins) if c == 0]
    right = [v for v, c in zip(ids, coins) if c == 1]
    return left, right


def random_tree_node(ids, rng: np.random.Generator):
    """Raw random-always tree node over an arbitrary vertex id list."""
    ids = list(ids)
    if not ids:
        raise ValueError("vertex set must be nonempty")
    if len(ids) == 1:
        return ids[0]
    left, right = _proper_bipartition(ids, rng)
    return (random_tree_node(left, rng), random_tree_node(right, rng))


def random_always(n: int, rng: np.random.Generator) -> Dendrogram:
    """Algorithm that recursively cuts each cluster uniformly at random."""
    return Dendrogram(random_tree_node(range(n), rng), n)


def expected_similarity_reward_random(g: WeightedGraph) -> float:
    """(n-2) W / 3: the exact expectation of the random-always similarity reward."""
    if g.n < 2:
        raise ValueError("need n >= 2")
    return (g.n - 2) * total_weight(g) / 3.0


def expected_dissimilarity_reward_random(g: WeightedGraph) -> float:
    """(2/3) n W: the quoted random-always dissimilarity value.

    This is the leading-order value; see
    :func:`exact_expected_dissimilarity_reward_random` for the exact finite-n
    expectation (2n + 2) W / 3, which exceeds it by 2W/3.
    """
    if g.n < 3:
        raise ValueError("need n >= 3")
    return 2.0 * g.n * total_weight(g) / 3.0


def exact_expected_dissimilarity_reward_random(g: WeightedGraph) -> float:
    """(2n+2) W / 3, from E|T_ij| = 2 + 2(n-2)/3.

    Each third vertex stays below the (i,j) split with probability exactly
    2/3 by exchangeability of the decisive coin flips.
    """
    return (2.0 * g.n + 2.0) * total_weight(g) / 3.0


def _batch_lca_sums(
    n: int,
    w: np.ndarray,
    trials: int,
    rng: np.random.Generator,
    triplet_counts: np.ndarray | None = None,
) -> np.ndarray:
    """Per-trial sum of w_ij |T_ij| for random-always trees, vectorized.

    Maintains the trialwise co-cluster relation ``eq`` and splits every
    non-singleton cluster per round with a proper fair-coin bipartition
    (improper clusters are recoined).  When a pair separates in a round its
    LCA size is the current cluster size.  If ``triplet_counts`` (n,n,n) is
    given, accumulates counts of the event "k already separated when (i,j)
    split", whose frequency estimates Pr[k is not a leaf of T_ij].
    """
    eq = np.ones((trials, n, n), dtype=bool)
    out = np.zeros(trials)
    for _ in range(n):  # cluster sizes strictly decrease; n rounds suffice
        sizes = eq.sum(axis=2)
        if sizes.max() == 1:
            break
        coins = rng.integers(0, 2, size=(trials, n), dtype=np.int64)
        while True:
            csum = np.einsum("tij,tj->ti", eq, coins)
            bad = (sizes >= 2) & ((csum == 0) | (csum == sizes))
            if not bad.any():
                break
            redraw = rng.integers(0, 2, size=(trials, n), dtype=np.int64)
            coins = np.where(bad, redraw, coins)
        same_coin = coins[:, :, None] == coins[:, None, :]
        new_eq = eq & same_coin
        newly = eq & ~same_coin
        out += np.einsum("tij,ti,ij->t", newly, sizes.astype(np.float64), w) / 2.0
        if triplet_counts is not None:
            triplet_counts += np.einsum(
                "tij,tik->ijk", newly.astype(np.float64), (~eq).astype(np.float64)
            )
        eq = new_eq
    return out


def monte_carlo_objective_samples(
    g: WeightedGraph, objective: str, trials: int, seed: int, chunk: int = 20000
) -> np.ndarray:
    """Per-trial objective values of random-always trees (fixed trial order)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if objective not in ("similarity", "dissimilarity", "dasgupta"):
        raise ValueError(f"unknown objective {objective!r}")
    w = g.matrix
    nw = g.n * total_weight(g)
    streams = np.random.SeedSequence(seed).spawn((trials + chunk - 1) // chunk)
    parts = []
    done = 0
    for ss in streams:
        t = min(chunk, trials - done)
        sums = _batch_lca_sums(g.n, w, t, np.random.default_rng(ss))
        parts.append(sums)
        done += t
    sums = np.concatenate(parts)
    if objective == "similarity":
        return nw - sums
    return sums  # dissimilarity and dasgupta are both the LCA sum


def monte_carlo_mean(
    g: WeightedGraph, objective: str, trials: int, seed: int
) -> tuple[float, float]:
    """Sample mean and standard error of the objective over random trees."""
    vals = monte_carlo_objective_samples(g, objective, trials, seed)
    mean = float(vals.mean())
    if trials == 1:
        return mean, 0.0
    return mean, float(vals.std(ddof=1) / np.sqrt(trials))


def triplet_nonleaf_frequencies(
    n: int, trials: int, seed: int, chunk: int = 20000
) -> np.ndarray:
    """Empirical Pr[k not a leaf of T_ij] per (i, j, k), random-always trees.

    The exact probability is 1/3 for every triplet of distinct vertices.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    counts = np.zeros((n, n, n))
    w = np.zeros((n, n))
    streams = np.random.SeedSequence(seed).spawn((trials + chunk - 1) // chunk)
    done = 0
    for ss in streams:
        t = min(chunk, trials - done)
        _batch_lca_sums(n, w, t, np.random.default_rng(ss), triplet_counts=counts)
        done += t
    freq = counts / trials
    for i in range(n):
        freq[i, i, :] = np.nan
        freq[i, :, i] = np.nan
        freq[:, i, i] = np.nan
    return freq
