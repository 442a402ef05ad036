"""Peel-off / max-cut hierarchical clustering for dissimilarity weights.

High-degree vertices are split off one at a time down a caterpillar spine,
the remainder is cut once by hyperplane-rounded max-cut, and both sides are
finished with random recursive bipartitions.  Also provides the naive
recursive max-cut baseline and the constant balancing that yields the
0.667078 dissimilarity approximation factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .graphs import WeightedGraph, induced_subgraph, total_weight
from .random_trees import random_always, random_tree_node, stream_rng
from .sdp import build_maxcut_sdp, solve_low_rank
from .trees import Dendrogram, dissimilarity_reward

__all__ = [
    "PeelConfig",
    "GW_RATIO",
    "peel_off_first_maxcut_next",
    "gw_maxcut",
    "recursive_maxcut_baseline",
    "alpha_dissimilarity",
    "optimal_eps_for_gamma",
    "optimize_alpha_dissimilarity",
    "best_of_dissimilarity",
]

GW_RATIO = 0.87856


@dataclass(frozen=True)
class PeelConfig:
    """gamma scales the peel threshold tau = 2 W gamma / n (gamma > 1 for the
    peel bound); gw_rounds counts the rounding hyperplanes."""

    gamma: float = 11.1
    gw_rounds: int = 100

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.gw_rounds < 1:
            raise ValueError("gw_rounds must be >= 1")

    def tau(self, g: WeightedGraph) -> float:
        return 2.0 * total_weight(g) * self.gamma / g.n


def gw_maxcut(
    g: WeightedGraph, rounds: int = 100, seed: int = 0
) -> tuple[np.ndarray, float]:
    """Best-of-`rounds` hyperplane rounding of the max-cut vector relaxation.

    Returns (boolean side indicator, cut value); ties go to the lowest round
    index.  A degenerate all-one-side winner is repaired by moving vertex 0,
    so the returned cut is always proper.
    """
    if g.n < 2:
        raise ValueError("need n >= 2")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    sol = solve_low_rank(build_maxcut_sdp(g), seed=seed)
    v = sol.vectors[1]
    rng = stream_rng(seed, "gw-rounding")
    h = rng.standard_normal((rounds, v.shape[1]))
    sides = (h @ v.T) >= 0.0  # (rounds, n)
    w = g.matrix
    b = sides.astype(np.float64)
    vals = np.einsum("ti,ij,tj->t", b, w, 1.0 - b)
    best = int(np.argmax(vals))
    side = sides[best].copy()
    if side.all() or not side.any():
        side[0] = not side[0]
    value = float(side.astype(np.float64) @ w @ (~side).astype(np.float64))
    return side, value


def peel_off_first_maxcut_next(
    g: WeightedGraph, cfg: PeelConfig, seed: int
) -> tuple[Dendrogram, list[int]]:
    """Caterpillar of peeled high-degree vertices, then max-cut, then random.

    While some vertex's weighted degree in the current induced subgraph
    exceeds tau = 2 W gamma / n (computed once from the input graph), peel
    the highest-degree vertex (ties to the lowest id) as a ({v}, rest) cut.
    The remainder gets one hyperplane-rounded max cut and random-always
    trees inside each side.  Returns the tree and the peel order.
    """
    if g.n < 2:
        raise ValueError("need n >= 2")
    tau = cfg.tau(g)
    w = g.matrix.copy()
    alive = list(range(g.n))
    peeled: list[int] = []
    while len(alive) > 1:
        sub = w[np.ix_(alive, alive)]
        degrees = sub.sum(axis=1)
        top = int(np.argmax(degrees))  # argmax takes the lowest id on ties
        if degrees[top] <= tau:
            break
        peeled.append(alive[top])
        alive.pop(top)

    rng = stream_rng(seed, "peel-maxcut")
    if len(alive) == 1:
        rest_node = alive[0]
    else:
        rest_g, ids = induced_subgraph(g, alive)
        side, _ = gw_maxcut(rest_g, cfg.gw_rounds, seed)
        left = [ids[i] for i in range(len(ids)) if side[i]]
        right = [ids[i] for i in range(len(ids)) if not side[i]]
        rest_node = (random_tree_node(left, rng), random_tree_node(right, rng))

    node = rest_node
    for v in reversed(peeled):
        node = (v, node)
    return Dendrogram(node, g.n), peeled


def recursive_maxcut_baseline(g: WeightedGraph, seed: int, gw_rounds: int = 100) -> Dendrogram:
    """Top-down recursive hyperplane-rounded max cuts all the way to leaves."""
    if g.n < 2:
        raise ValueError("need n >= 2")

    def rec(vertices: list[int], depth: int):
        if len(vertices) == 1:
            return vertices[0]
        if len(vertices) == 2:
            return (vertices[0], vertices[1])
        sub, ids = induced_subgraph(g, vertices)
        side, _ = gw_maxcut(sub, gw_rounds, seed * 1000003 + depth)
        left = [ids[i] for i in range(len(ids)) if side[i]]
        right = [ids[i] for i in range(len(ids)) if not side[i]]
        return (rec(left, 2 * depth + 1), rec(right, 2 * depth + 2))

    return Dendrogram(rec(list(range(g.n)), 0), g.n)


def alpha_dissimilarity(gamma: float, eps: float, rho: float = GW_RATIO) -> float:
    """min of the two guarantee cases at (gamma, eps), with delta = sqrt(eps/gamma).

    Case 1 covers instances whose max cut is large:
    rho (1 - 1/gamma) (1 - (eps/delta)/(1-eps) - delta gamma/(1-eps));
    case 2 covers the rest: 2/(3(1-eps)).  The factor is their minimum.
    """
    if gamma <= 1:
        return rho * (1.0 - 1.0 / gamma) if gamma > 0 else -math.inf
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    delta = math.sqrt(eps / gamma)
    case1 = rho * (1.0 - 1.0 / gamma) * (
        1.0 - (eps / delta) / (1.0 - eps) - delta * gamma / (1.0 - eps)
    )
    case2 = 2.0 / (3.0 * (1.0 - eps))
    return min(case1, case2)


def optimal_eps_for_gamma(gamma: float, rho: float = GW_RATIO) -> float:
    """eps balancing the two cases: sqrt(eps) is the nonnegative root of
    s^2 + 2 sqrt(gamma) s + (2 gamma / (3 rho (gamma-1)) - 1) = 0.

    Raises ValueError when the root is negative or complex (gamma too small
    for the cases to balance).
    """
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    disc = gamma + 1.0 - 2.0 * gamma / (3.0 * rho * (gamma - 1.0))
    if disc < 0.0:
        raise ValueError(f"negative discriminant at gamma = {gamma}")
    s = -math.sqrt(gamma) + math.sqrt(disc)
    if s < 0.0:
        raise ValueError(f"no nonnegative root at gamma = {gamma}")
    return s * s


def optimize_alpha_dissimilarity(rho: float = GW_RATIO) -> tuple[float, float, float]:
    """(gamma*, eps*, alpha*): scan gamma, balance eps per gamma, refine."""

    def neg(gamma: float) -> float:
        try:
            eps = optimal_eps_for_gamma(gamma, rho)
        except ValueError:
            return math.inf
        if eps <= 0.0:
            return math.inf
        return -alpha_dissimilarity(gamma, eps, rho)

    grid = np.arange(4.2, 40.0, 0.1)
    vals = [neg(float(x)) for x in grid]
    best = int(np.argmin(vals))
    lo = float(grid[max(0, best - 1)])
    hi = float(grid[min(len(grid) - 1, best + 1)])
    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    gamma = float(res.x)
    eps = optimal_eps_for_gamma(gamma, rho)
    return gamma, eps, float(-res.fun)


def best_of_dissimilarity(
    g: WeightedGraph, runs: int, seed: int, cfg: PeelConfig | None = None
) -> tuple[Dendrogram, float]:
    """Best realized dissimilarity reward over `runs` runs of both algorithms."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    cfg = cfg or PeelConfig()
    rng = stream_rng(seed, "best-of-dissim")
    best_tree, best_val = None, -math.inf
    for r in range(runs):
        t_peel, _ = peel_off_first_maxcut_next(g, cfg, seed * 1000003 + r)
        t_rnd = random_always(g.n, rng)
        for t in (t_peel, t_rnd):
            val = dissimilarity_reward(g, t)
            if val > best_val:
                best_tree, best_val = t, val
    return best_tree, best_val
