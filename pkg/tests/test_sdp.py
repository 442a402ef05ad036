import numpy as np
import pytest

from hclab.exact import brute_force_opt
from hclab.graphs import WeightedGraph, make_random_instance, total_weight
from hclab.random_trees import random_always
from hclab.sdp import (
    build_hc_sdp,
    build_maxcut_sdp,
    check_feasibility,
    default_rank,
    hc_sdp_objective,
    solve_low_rank,
    tree_to_vectors,
)
from hclab.trees import Dendrogram, similarity_reward


def unit_clique(m):
    return WeightedGraph(m, {(i, j): 1.0 for i in range(m) for j in range(i + 1, m)})


def test_hc_program_shape():
    p = build_hc_sdp(unit_clique(3))
    counts = p.constraint_counts()
    assert p.free_levels == (2,)
    assert counts["spreading"] == 6
    assert counts["monotonicity"] == 3
    assert counts["nonnegative_inner_product"] == 6
    assert p.variable_count() == 3 * 2  # n(n-1) vectors over levels 1..n-1
    assert default_rank(p) >= 2


def test_tree_to_vectors_caterpillar():
    t = Dendrogram(((0, 1), 2), 3)
    sol = tree_to_vectors(t, 3)
    x2 = sol.x[2]
    assert x2[0, 1] == 0.0 and x2[0, 2] == 1.0 and x2[1, 2] == 1.0
    assert (sol.x[1][~np.eye(3, dtype=bool)] == 1.0).all()
    ok, residuals = check_feasibility(sol, 0.0)
    assert ok and max(residuals.values()) == 0.0


def test_tree_to_vectors_objective_is_similarity_reward():
    rng = np.random.default_rng(0)
    for seed in range(10):
        n = int(rng.integers(3, 9))
        g = make_random_instance(n, 0.7, "uniform01", seed)
        t = random_always(n, rng)
        sol = tree_to_vectors(t, n)
        assert hc_sdp_objective(g, sol) == pytest.approx(
            similarity_reward(g, t), rel=1e-12, abs=1e-9
        )


def test_check_feasibility_flags_corruption():
    sol = tree_to_vectors(Dendrogram(((0, 1), 2), 3), 3)
    sol.vectors[2][0] *= 2.0
    ok, residuals = check_feasibility(sol, 1e-6)
    assert not ok and residuals["unit_norm"] == pytest.approx(1.0)


def test_solver_trivial_cases():
    g = WeightedGraph(2, {(0, 1): 1.0})
    sol = solve_low_rank(build_hc_sdp(g))
    assert sol.objective == 0.0
    with pytest.raises(ValueError):
        solve_low_rank(build_hc_sdp(unit_clique(3)), rank=1)


def test_solver_dominates_warm_start():
    g = make_random_instance(6, 0.7, "uniform01", 5)
    opt_tree, opt = brute_force_opt(g, "similarity")
    sol = solve_low_rank(build_hc_sdp(g), seed=0, warm_start=opt_tree)
    assert hc_sdp_objective(g, sol) >= opt - 1e-9
    ok, residuals = check_feasibility(sol, 1e-5)
    assert ok, residuals


def test_objective_rotation_invariant():
    g = make_random_instance(5, 0.8, "uniform01", 1)
    sol = solve_low_rank(build_hc_sdp(g), seed=2)
    obj = hc_sdp_objective(g, sol)
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((sol.vectors[2].shape[1],) * 2))
    sol.vectors[2] = sol.vectors[2] @ q  # x matrices unchanged by rotation
    assert hc_sdp_objective(g, sol) == pytest.approx(obj)


def test_maxcut_known_values():
    edge = WeightedGraph(2, {(0, 1): 1.0})
    assert solve_low_rank(build_maxcut_sdp(edge), seed=0).objective == pytest.approx(1.0)
    k3 = unit_clique(3)
    assert solve_low_rank(build_maxcut_sdp(k3), seed=0).objective == pytest.approx(
        2.25, abs=1e-6
    )
    c5 = WeightedGraph(5, {(0, 1): 1.0, (1, 2): 1.0, (2, 3): 1.0, (3, 4): 1.0, (0, 4): 1.0})
    want = 5 * (1 - np.cos(4 * np.pi / 5)) / 2
    assert solve_low_rank(build_maxcut_sdp(c5), seed=0).objective == pytest.approx(
        want, abs=1e-5
    )


def test_solver_deterministic():
    g = make_random_instance(5, 0.8, "uniform01", 3)
    a = solve_low_rank(build_hc_sdp(g), seed=9)
    b = solve_low_rank(build_hc_sdp(g), seed=9)
    assert a.objective == b.objective
    assert all(np.array_equal(a.vectors[t], b.vectors[t]) for t in a.vectors)
