"""Vector programs and a low-rank factorized solver.

Covers the level-indexed hierarchical-clustering relaxation (one unit vector
per vertex per level, spreading and monotonicity constraints on pairwise
separations) and the single-level max-cut relaxation, both solved by
projected gradient ascent on the factor matrices with an augmented
Lagrangian for the inequality constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import WeightedGraph, total_weight
from .trees import Dendrogram, lca_sizes

__all__ = [
    "VectorProgram",
    "SdpSolution",
    "SdpConvergenceError",
    "build_hc_sdp",
    "build_maxcut_sdp",
    "solve_low_rank",
    "tree_to_vectors",
    "hc_sdp_objective",
    "check_feasibility",
    "default_rank",
]

# feasibility tolerances per constraint family (defaults used by invariants)
UNIT_NORM_TOL = 1e-6
X_RANGE_TOL = 1e-6
SPREADING_TOL = 1e-5
MONOTONICITY_TOL = 1e-6


class SdpConvergenceError(RuntimeError):
    """Solver failed to produce a feasible-to-tolerance iterate."""

    def __init__(self, message: str, residuals: dict[str, float]):
        super().__init__(f"{message}; residuals: {residuals}")
        self.residuals = residuals


@dataclass(frozen=True)
class VectorProgram:
    """A unit-sphere vector program over pairwise inner products.

    kind "hc": maximize sum_t sum_{i<j} w_ij (1 - x^t_ij) subject to
    spreading (sum_{j != i} x^t_ij >= n - t), monotonicity
    (x^{t+1} <= x^t, x^1 = 1) and nonnegative inner products; one unit
    vector per (vertex, level) for levels t = 1..n-1 (level 1 is pinned to
    an orthonormal assignment and carries no free variables).

    kind "maxcut": maximize sum_{i<j} w_ij (1 - u_i . u_j) / 2 over unit
    vectors, unconstrained otherwise.
    """

    kind: str
    n: int
    weights: np.ndarray = field(repr=False)

    @property
    def free_levels(self) -> tuple[int, ...]:
        if self.kind == "maxcut":
            return (1,)
        return tuple(range(2, self.n))

    @property
    def levels(self) -> tuple[int, ...]:
        if self.kind == "maxcut":
            return (1,)
        return tuple(range(1, self.n))

    def constraint_counts(self) -> dict[str, int]:
        n = self.n
        if self.kind == "maxcut":
            return {"unit_norm": n}
        pairs = n * (n - 1) // 2
        nlev = n - 1
        return {
            "unit_norm": n * nlev,
            "nonnegative_inner_product": pairs * nlev,
            "spreading": n * nlev,
            "monotonicity": pairs * (nlev - 1),
            "level_one_pinned": pairs,
        }

    def variable_count(self) -> int:
        return self.n * len(self.levels)


@dataclass
class SdpSolution:
    """Vectors and separations per level, with residuals of all constraints.

    ``vectors[t]`` is an (n, d) array of unit rows; ``x[t]`` the symmetric
    separation matrix x^t_ij = |v_i - v_j|^2 / 2 (zero diagonal).
    """

    vectors: dict[int, np.ndarray]
    x: dict[int, np.ndarray]
    objective: float
    residuals: dict[str, float]
    converged: bool
    iterations: int


def build_hc_sdp(g: WeightedGraph) -> VectorProgram:
    if g.n < 2:
        raise ValueError("need n >= 2")
    return VectorProgram("hc", g.n, g.matrix.copy())


def build_maxcut_sdp(g: WeightedGraph) -> VectorProgram:
    if g.n < 2:
        raise ValueError("need n >= 2")
    return VectorProgram("maxcut", g.n, g.matrix.copy())


def default_rank(p: VectorProgram) -> int:
    """min(n, 1 + ceil(sqrt(2 C))): the usual low-rank sufficiency heuristic."""
    c = sum(v for k, v in p.constraint_counts().items() if k != "unit_norm")
    c = max(c, p.n)
    return min(p.n, 1 + math.ceil(math.sqrt(2 * c)))


def _x_from_gram(gram: np.ndarray) -> np.ndarray:
    x = 1.0 - gram
    np.fill_diagonal(x, 0.0)
    return x


def _partition_at_level(sizes: np.ndarray, t: int, n: int) -> np.ndarray:
    """Cluster labels of the maximal clusters of size <= t (lca size matrix)."""
    labels = -np.ones(n, dtype=np.int64)
    nxt = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        members = [i] + [j for j in range(i + 1, n) if sizes[i, j] <= t and sizes[i, j] > 0]
        for j in members:
            labels[j] = nxt
        nxt += 1
    return labels


def tree_to_vectors(t: Dendrogram, n: int) -> SdpSolution:
    """Integral embedding: orthonormal vectors per maximal cluster per level.

    Exactly feasible; its objective against any graph equals the similarity
    reward of the tree (each pair contributes at the n - |T_ij| levels where
    it is still merged).
    """
    if t.n != n:
        raise ValueError("tree size mismatch")
    sizes = lca_sizes(t)
    vectors: dict[int, np.ndarray] = {}
    xs: dict[int, np.ndarray] = {}
    for level in range(1, n):
        labels = _partition_at_level(sizes, level, n)
        v = np.eye(n)[labels]
        vectors[level] = v
        xs[level] = _x_from_gram(v @ v.T)
    residuals = {
        "unit_norm": 0.0,
        "x_range": 0.0,
        "spreading": 0.0,
        "monotonicity": 0.0,
        "level_one": 0.0,
    }
    return SdpSolution(vectors, xs, 0.0, residuals, True, 0)


def hc_sdp_objective(g: WeightedGraph, sol: SdpSolution) -> float:
    """sum_t sum_{i<j} w_ij (1 - x^t_ij) for the solution's levels."""
    w = g.matrix
    acc = 0.0
    for level in range(1, g.n):
        x = sol.x[level]
        acc += (w * (1.0 - x)).sum() / 2.0
    return float(acc)


def _hc_residuals(xs: dict[int, np.ndarray], vectors: dict[int, np.ndarray], n: int):
    off = ~np.eye(n, dtype=bool)
    unit = 0.0
    for level, v in vectors.items():
        unit = max(unit, float(np.abs(np.linalg.norm(v, axis=1) - 1.0).max()))
    x_range = 0.0
    spreading = 0.0
    for level in range(1, n):
        x = xs[level]
        x_range = max(x_range, float(np.maximum(-x[off], x[off] - 1.0).max(initial=0.0)))
        rowsum = x.sum(axis=1)
        spreading = max(spreading, float(np.maximum((n - level) - rowsum, 0.0).max()))
    mono = 0.0
    for level in range(1, n - 1):
        diff = xs[level + 1] - xs[level]
        mono = max(mono, float(diff[off].max(initial=0.0)))
    level_one = float(np.abs(xs[1][off] - 1.0).max(initial=0.0)) if n > 1 else 0.0
    return {
        "unit_norm": unit,
        "x_range": x_range,
        "spreading": spreading,
        "monotonicity": mono,
        "level_one": level_one,
    }


def check_feasibility(sol: SdpSolution, tol: float = SPREADING_TOL):
    """(pass, residuals): max violation per constraint family vs a single tol."""
    n = next(iter(sol.x.values())).shape[0]
    residuals = _hc_residuals(sol.x, sol.vectors, n)
    ok = all(v <= tol for v in residuals.values())
    return ok, residuals


def _normalize_rows(v: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return v / norms


def _solve_maxcut(
    p: VectorProgram,
    rank: int,
    tol: float,
    max_iter: int,
    seed: int,
    restarts: int = 3,
) -> SdpSolution:
    w = p.weights
    n = p.n
    scale = max(w.sum(axis=1).max(), 1e-12)
    eta = 1.0 / scale
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x6D63]))
    best_v, best_obj = None, -np.inf
    iterations = 0
    for _ in range(restarts):
        v = _normalize_rows(rng.standard_normal((n, rank)))
        for it in range(max_iter):
            newv = _normalize_rows(v - eta * (w @ v))
            iterations += 1
            if np.abs(newv - v).max() < tol:
                v = newv
                break
            v = newv
        obj = float((w * (1.0 - v @ v.T)).sum() / 4.0)
        if obj > best_obj:
            best_obj, best_v = obj, v
    gram = best_v @ best_v.T
    x = _x_from_gram(gram)
    residuals = {"unit_norm": float(np.abs(np.linalg.norm(best_v, axis=1) - 1.0).max())}
    return SdpSolution({1: best_v}, {1: x}, best_obj, residuals, True, iterations)


def solve_low_rank(
    p: VectorProgram,
    rank: int | None = None,
    tol: float = 1e-5,
    max_iter: int = 4000,
    seed: int = 0,
    warm_start: Dendrogram | None = None,
    inner_steps: int = 25,
) -> SdpSolution:
    """Factorized augmented-Lagrangian ascent with per-step renormalization.

    Deterministic given the seed.  The iterate history keeps the best
    feasible-to-tolerance point seen, so a feasible warm start (default: the
    integral embedding of a random-always tree) guarantees the returned
    objective never falls below the warm start's.  Raises
    :class:`SdpConvergenceError` if no feasible iterate is ever found.
    """
    if rank is None:
        rank = default_rank(p)
    if rank < 2:
        raise ValueError("rank must be >= 2")
    if p.kind == "maxcut":
        return _solve_maxcut(p, rank, tol, max_iter, seed)

    n = p.n
    w = p.weights
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x6863]))
    if n == 2:
        vecs = {1: np.eye(2)}
        xs = {1: _x_from_gram(np.eye(2))}
        res = _hc_residuals(xs, {}, 2)
        return SdpSolution(vecs, xs, 0.0, res, True, 0)

    levels = list(p.free_levels)  # t = 2..n-1
    nlev = len(levels)
    if warm_start is None:
        from .random_trees import random_tree_node

        warm_start = Dendrogram(random_tree_node(range(n), rng), n)
    start = tree_to_vectors(warm_start, n)
    if rank < n:
        raise ValueError("integral warm starts require rank >= n")
    vs = [start.vectors[t][:, :rank].copy() for t in levels]

    lam_nonneg = [np.zeros((n, n)) for _ in levels]
    lam_spread = [np.zeros(n) for _ in levels]
    lam_mono = [np.zeros((n, n)) for _ in levels[:-1]]
    rho = 1.0
    rho_max = 1e6
    off = ~np.eye(n, dtype=bool)

    def grams():
        return [v @ v.T for v in vs]

    def residual_and_objective(gs):
        xs = {t: _x_from_gram(gs[i]) for i, t in enumerate(levels)}
        xs[1] = _x_from_gram(np.eye(n))
        res = _hc_residuals(xs, {t: vs[i] for i, t in enumerate(levels)}, n)
        obj = sum((w * gs[i]).sum() / 2.0 for i in range(nlev))
        return res, float(obj), xs

    def snapshot(obj, res, it):
        xs = {t: _x_from_gram(vs[i] @ vs[i].T) for i, t in enumerate(levels)}
        xs[1] = _x_from_gram(np.eye(n))
        vecs = {t: vs[i].copy() for i, t in enumerate(levels)}
        vecs[1] = np.eye(n)
        return SdpSolution(vecs, xs, obj, dict(res), True, it)

    best: SdpSolution | None = None
    res0, obj0, _ = residual_and_objective(grams())
    if max(res0.values()) <= tol:
        best = snapshot(obj0, res0, 0)
    w_scale = max(float(np.abs(w).sum(axis=1).max()), 1e-9)
    def merit(cur_vs) -> float:
        """Augmented Lagrangian value (to maximize) at the given factors."""
        gs = [v @ v.T for v in cur_vs]
        val = sum((w * gs[i]).sum() / 2.0 for i in range(nlev))
        for i, t in enumerate(levels):
            m = np.maximum(0.0, lam_nonneg[i] / rho - gs[i])
            m[~off] = 0.0
            val -= rho / 4.0 * float((m**2).sum())  # /4: pairs counted twice
            c = (gs[i].sum(axis=1) - 1.0) - (t - 1.0)
            ms = np.maximum(0.0, c + lam_spread[i] / rho)
            val -= rho / 2.0 * float((ms**2).sum())
        for i in range(nlev - 1):
            m = np.maximum(0.0, (gs[i] - gs[i + 1]) + lam_mono[i] / rho)
            m[~off] = 0.0
            val -= rho / 4.0 * float((m**2).sum())
        return val

    def merit_grads():
        gs = grams()
        grads = [w @ vs[i] for i in range(nlev)]
        for i, t in enumerate(levels):
            m = np.maximum(0.0, lam_nonneg[i] / rho - gs[i])
            m[~off] = 0.0
            grads[i] += rho * (m @ vs[i])
            c = (gs[i].sum(axis=1) - 1.0) - (t - 1.0)
            ms = np.maximum(0.0, c + lam_spread[i] / rho)
            a = ms[:, None] + ms[None, :]
            a[~off] = 0.0
            grads[i] -= rho * (a @ vs[i])
        for i in range(nlev - 1):
            m = np.maximum(0.0, (gs[i] - gs[i + 1]) + lam_mono[i] / rho)
            m[~off] = 0.0
            grads[i] -= rho * (m @ vs[i])
            grads[i + 1] += rho * (m @ vs[i + 1])
        return grads

    history: list[float] = []
    check_res = np.inf
    eta = 1.0 / (w_scale + rho)
    sweeps = 0
    last_improve = 0
    while sweeps < max_iter:
        sweeps += 1
        # inner problem: ascend the merit with a backtracking step, keeping
        # the multipliers fixed
        cur = merit(vs)
        for _ in range(inner_steps):
            grads = merit_grads()
            eta = min(eta * 2.0, 1.0 / w_scale)
            improved = False
            for _ in range(30):
                trial = [_normalize_rows(vs[i] + eta * grads[i]) for i in range(nlev)]
                trial_val = merit(trial)
                if trial_val > cur:
                    vs = trial
                    cur = trial_val
                    improved = True
                    break
                eta *= 0.5
            if not improved:
                break

        gs = grams()
        for i, t in enumerate(levels):
            lam_nonneg[i] = np.maximum(0.0, lam_nonneg[i] - rho * gs[i])
            lam_nonneg[i][~off] = 0.0
            c = (gs[i].sum(axis=1) - 1.0) - (t - 1.0)
            lam_spread[i] = np.maximum(0.0, lam_spread[i] + rho * c)
        for i in range(nlev - 1):
            lam_mono[i] = np.maximum(0.0, lam_mono[i] + rho * (gs[i] - gs[i + 1]))
            lam_mono[i][~off] = 0.0

        res, obj, _ = residual_and_objective(gs)
        res_max = max(res.values())
        if res_max <= tol and (best is None or obj > best.objective):
            best = snapshot(obj, res, sweeps)
            last_improve = sweeps
        if sweeps % 5 == 0:
            if res_max > 0.5 * check_res and res_max > tol:
                rho = min(rho * 2.0, rho_max)
            check_res = res_max
        history.append(obj)
        if (
            len(history) > 50
            and res_max <= tol
            and abs(history[-1] - history[-51]) < 1e-7 * max(1.0, abs(history[-1]))
        ):
            break
        # stagnation: the best feasible iterate stopped improving long ago
        # (wait longer before the first improvement — regaining feasibility
        # from a cold start takes a few hundred multiplier updates)
        window = 200 if last_improve > 0 else 600
        if best is not None and sweeps - last_improve >= window:
            break

    if best is None:
        res, obj, _ = residual_and_objective(grams())
        raise SdpConvergenceError(
            f"no feasible iterate within {sweeps} sweeps at tol {tol}", res
        )
    best.converged = sweeps < max_iter
    best.iterations = sweeps
    return best
