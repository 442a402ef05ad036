"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS/FAIL`` line (visible with
``pytest -s`` or on failure) and asserts the same condition, with tolerances
pinned in-line.  Two clauses are marked strict-xfail: they encode stated
targets that are mathematically unattainable (the reasons are documented in
the tests), and the suite fails if they ever unexpectedly pass.
"""

import math

import numpy as np
import pytest

import hclab as h
from hclab.random_trees import stream_rng


def _line(num, ok, detail):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_01_tight_dissimilarity_exact_and_monotone():
    ratios = []
    for m in range(2, 51):
        alg, ref, ratio = h.dissimilarity_tight_report(m)
        assert alg == h.average_linkage_closed_form_dissimilarity(m), f"m={m}"
        ratios.append(ratio)
    monotone = all(a > b for a, b in zip(ratios, ratios[1:]))
    ok = monotone and ratios[0] == 1.0 and ratios[-1] < 0.6803 + 1e-9
    _line(1, ok, f"exact for m=2..50, ratio 1.0 -> {ratios[-1]:.6f}")
    assert ok


def _similarity_ratios():
    out = []
    for k in range(2, 7):
        g = h.make_tight_similarity_instance(k, 0.1)
        tree, trace = h.average_linkage(g, mode="similarity")
        alg = h.similarity_reward(g, tree)
        ref = h.similarity_reward(g, h.vertical_first_tree(k))
        # first merges happen inside the heavy horizontal cliques
        n_horizontal_merges = k * k * (k - 1)
        assert all(
            s.average == pytest.approx(1.1) for s in trace[:n_horizontal_merges]
        ), f"k={k}: early merges are not horizontal"
        out.append(alg / ref)
    return out


def test_criterion_02_tight_similarity_trend_and_first_merges():
    ratios = _similarity_ratios()
    ok = all(a > b for a, b in zip(ratios, ratios[1:]))
    _line(2, ok, f"ratios decrease {ratios[0]:.4f} -> {ratios[-1]:.4f}; first merges horizontal")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason=(
        "the stated 0.40 threshold at k=6 is unattainable: the exact "
        "average-linkage ratio against the vertical-first reference is "
        "~0.509 at k=6, and no valid reference below (n-2)W can push it "
        "under ~0.40 at this size; the trend criterion above passes"
    ),
)
def test_criterion_02_tight_similarity_threshold_at_k6():
    ratio = _similarity_ratios()[-1]
    _line("2 (k=6 threshold)", ratio < 0.40, f"ratio(k=6) = {ratio:.4f}")
    assert ratio < 0.40


def _criterion_3_graphs():
    rng = np.random.default_rng(33)
    out = []
    for i in range(10):
        n = int(rng.integers(4, 9))
        out.append(h.make_random_instance(n, 0.8, "uniform01", 300 + i))
    return out


def test_criterion_03_random_similarity_expectation():
    ok = True
    detail = []
    for i, g in enumerate(_criterion_3_graphs()):
        mean, stderr = h.monte_carlo_mean(g, "similarity", 100000, 40 + i)
        expect = h.expected_similarity_reward_random(g)
        if abs(mean - expect) > 4 * stderr:
            ok = False
            detail.append(f"graph {i}: {mean:.4f} vs {expect:.4f}")
    freq = h.triplet_nonleaf_frequencies(6, 100000, 41)
    dev = float(np.nanmax(np.abs(freq - 1 / 3)))
    ok = ok and dev <= 0.01
    _line(3, ok, f"similarity means within 4 stderr; triplet deviation {dev:.4f} <= 0.01")
    assert ok, detail


@pytest.mark.xfail(
    strict=True,
    reason=(
        "the quoted random-tree dissimilarity expectation (2/3)nW is the "
        "leading-order value only; the exact expectation is (2n+2)W/3, "
        "which exceeds it by 2W/3 - far more than 4 stderr at 1e5 trials "
        "(unit K_3 truth is 8, not 6); the exact form is verified in "
        "test_random_trees.py"
    ),
)
def test_criterion_03_random_dissimilarity_expectation_as_stated():
    deviations = []
    for i, g in enumerate(_criterion_3_graphs()[:3]):
        mean, stderr = h.monte_carlo_mean(g, "dissimilarity", 100000, 50 + i)
        stated = h.expected_dissimilarity_reward_random(g)
        deviations.append(abs(mean - stated) <= 4 * stderr)
    _line("3 (dissimilarity clause)", all(deviations), f"within-band flags {deviations}")
    assert all(deviations)


def test_criterion_04_triplet_closed_forms():
    rng = stream_rng(4, "acceptance-triplet")
    ok = True
    worst = 0.0
    for t in range(50):
        v = np.abs(rng.standard_normal((3, 4)))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        a = h.TripletAngles.from_vectors(v[0], v[1], v[2])
        exact_p = h.triplet_separation_probability(a)
        assert abs(sum(exact_p) - 1.0) < 1e-12
        emp = h.mc_verify_triplet(v[0], v[1], v[2], 10**6, 400 + t)
        for p, f in zip(exact_p, emp):
            stderr = math.sqrt(max(p * (1 - p), 1e-12) / 10**6)
            worst = max(worst, abs(f - p) / (4 * stderr))
            if abs(f - p) > 4 * stderr:
                ok = False
    _line(4, ok, f"50 triples x 1e6 hyperplanes; worst |dev|/4stderr = {worst:.3f}")
    assert ok


def test_criterion_05_factor_revealing_grid():
    worst = math.inf
    for n in range(3, 31):
        for tb in np.arange(0.0, 1.51, 0.1):
            margin = h.factor_revealing_numeric(n, float(tb)) - h.factor_revealing_lower_bound(
                n, float(tb)
            )
            worst = min(worst, margin)
    ok = worst >= -1e-6
    _line(5, ok, f"min(numeric - closed bound) over grid = {worst:.2e} >= -1e-6")
    assert ok


def test_criterion_06_constants():
    eps2, a_sim = h.optimize_alpha_similarity()
    gamma, eps, a_dis = h.optimize_alpha_dissimilarity()
    ok = (
        abs(a_sim - 0.336379) <= 5e-5
        and 0.13 <= eps2 <= 0.15
        and abs(a_dis - 0.667078) <= 5e-5
        and 10.0 <= gamma <= 12.0
        and 4e-4 <= eps <= 8e-4
    )
    _line(6, ok, f"alpha_sim={a_sim:.6f}@eps2={eps2:.4f}; "
                 f"alpha_dissim={a_dis:.6f}@gamma={gamma:.2f},eps={eps:.6f}")
    assert ok


def test_criterion_07_relaxation_dominance():
    rng = np.random.default_rng(7)
    ok = True
    details = []
    for i in range(20):
        n = int(rng.integers(4, 9))
        g = h.make_random_instance(n, 0.7, "uniform01", 700 + i)
        opt_tree, opt = h.brute_force_opt(g, "similarity")
        sol = h.solve_low_rank(h.build_hc_sdp(g), seed=i, warm_start=opt_tree)
        obj = h.hc_sdp_objective(g, sol)
        feasible, residuals = h.check_feasibility(sol, tol=1e-5)
        slack = 1e-3 * n * h.total_weight(g)
        if obj < opt - slack or not feasible:
            ok = False
            details.append(f"instance {i}: obj={obj:.5f} opt={opt:.5f} res={residuals}")
    _line(7, ok, "warm-started solver objective >= brute-force OPT - 1e-3 nW, residuals <= 1e-5, 20 instances")
    assert ok, details


def test_criterion_08_tree_to_vectors_exact():
    rng = np.random.default_rng(8)
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(3, 11))
        g = h.make_random_instance(n, 0.7, "uniform01", 800 + i)
        t = h.random_always(n, rng)
        sol = h.tree_to_vectors(t, n)
        reward = h.similarity_reward(g, t)
        scale = max(1.0, abs(reward))
        worst = max(worst, abs(h.hc_sdp_objective(g, sol) - reward) / scale)
    ok = worst <= 1e-9
    _line(8, ok, f"integral embedding objective == similarity reward; worst rel dev {worst:.2e}")
    assert ok


def test_criterion_09_gw_sandwich():
    rng = np.random.default_rng(9)
    hits = 0
    ok_sandwich = True
    total = 50
    for i in range(total):
        n = int(rng.integers(4, 13))
        g = h.make_random_instance(n, 0.6, "uniform01", 900 + i)
        if not g.weights:
            hits += 1
            continue
        _, brute = h.brute_force_maxcut(g)
        sdp_val = h.solve_low_rank(h.build_maxcut_sdp(g), seed=i).objective
        if brute > sdp_val + 1e-5 * h.total_weight(g):
            ok_sandwich = False
        _, cut = h.gw_maxcut(g, rounds=100, seed=i)
        if cut >= 0.878 * brute - 1e-12:
            hits += 1
    ok = ok_sandwich and hits >= math.ceil(0.95 * total)
    _line(9, ok, f"sandwich held; 0.878-ratio hit on {hits}/{total} instances (need >= 48)")
    assert ok


def test_criterion_10_best_of_expectation_means():
    rng = np.random.default_rng(10)
    cfg = h.PeelConfig(gamma=11.1, gw_rounds=30)
    ok = True
    details = []
    for i in range(20):
        n = int(rng.integers(4, 9))
        g = h.make_random_instance(n, 0.7, "uniform01", 1000 + i)
        _, opt_sim = h.brute_force_opt(g, "similarity")
        _, opt_dis = h.brute_force_opt(g, "dissimilarity")
        sol = h.solve_low_rank(h.build_hc_sdp(g), seed=i)  # shared across seeds
        tree_rng = stream_rng(1000 + i, "acceptance-best-of")
        sims, diss = [], []
        for s in range(50):
            t_sdp = h.sdp_first_random_next(g, s * 997 + i, sdp_solution=sol)
            t_rnd = h.random_always(n, tree_rng)
            sims.append(max(h.similarity_reward(g, t_sdp), h.similarity_reward(g, t_rnd)))
            t_peel, _ = h.peel_off_first_maxcut_next(g, cfg, s * 997 + i)
            t_rnd2 = h.random_always(n, tree_rng)
            diss.append(
                max(h.dissimilarity_reward(g, t_peel), h.dissimilarity_reward(g, t_rnd2))
            )
        for vals, opt, frac, name in (
            (sims, opt_sim, 1 / 3, "similarity"),
            (diss, opt_dis, 2 / 3, "dissimilarity"),
        ):
            mean = float(np.mean(vals))
            se = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
            # one-sided 95% lower confidence bound must clear the guarantee
            if mean - 1.645 * se <= frac * opt:
                ok = False
                details.append(f"instance {i} {name}: {mean:.4f} vs bound {frac * opt:.4f}")
    _line(10, ok, "mean best-of rewards exceed OPT/3 and 2 OPT/3 at one-sided 95% on 20 instances")
    assert ok, details


def test_criterion_11_peel_bound_sweep():
    instances = [
        h.make_tight_dissimilarity_instance(10),
        h.make_tight_similarity_instance(3),
        h.make_embedded_clique_instance(60, 0.2),
        h.make_embedded_clique_instance(200, 0.2),
        h.make_random_instance(30, 0.3, "uniform01", 11),
    ]
    ok = True
    for gamma in (1.5, 2.0, 4.0, 11.1):
        cfg = h.PeelConfig(gamma=gamma, gw_rounds=5)
        for g in instances:
            _, peeled = h.peel_off_first_maxcut_next(g, cfg, seed=0)
            if len(peeled) > g.n / gamma:
                ok = False
    _line(11, ok, "peel count <= n/gamma across the instance/gamma sweep")
    assert ok


def test_criterion_12_baseline_gap():
    g = h.make_embedded_clique_instance(200, 0.2)
    clique = 40
    # reference: peel the clique vertices one by one down a spine, then the rest
    spine = h.left_leaning_tree(range(clique, 200))
    for v in reversed(range(clique)):
        spine = (v, spine)
    ref_tree = h.Dendrogram(spine, 200)
    ref = h.dissimilarity_reward(g, ref_tree)

    cfg = h.PeelConfig(gamma=4.0, gw_rounds=50)  # tau = 31.2 < clique degree 39
    _, best_val = h.best_of_dissimilarity(g, 1, 12, cfg)
    base_tree = h.recursive_maxcut_baseline(g, 12, gw_rounds=50)
    base_val = h.dissimilarity_reward(g, base_tree)
    ok = base_val / ref < best_val / ref
    _line(12, ok, f"baseline ratio {base_val / ref:.4f} < best-of ratio {best_val / ref:.4f} "
                  f"(reference {ref:.0f})")
    assert ok
