import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hclab.graphs import make_random_instance
from hclab.rounding import (
    TripletAngles,
    alpha_similarity,
    best_of_similarity,
    factor_revealing_lower_bound,
    factor_revealing_numeric,
    mc_verify_triplet,
    mid_level,
    optimize_alpha_similarity,
    sdp_first_random_next,
    triplet_separation_probability,
)
from hclab.trees import Dendrogram, similarity_reward


def test_triplet_closed_forms():
    half = math.pi / 2
    p = triplet_separation_probability(TripletAngles(half, half, half))
    assert p == pytest.approx((0.25, 0.25, 0.25, 0.25))
    theta = 0.7
    p = triplet_separation_probability(TripletAngles(0.0, theta, theta))
    assert p[0] == pytest.approx(theta / math.pi)  # classic two-vector case
    p = triplet_separation_probability(TripletAngles(0.0, 0.0, 0.0))
    assert p == (0.0, 0.0, 0.0, 1.0)


def test_triplet_inconsistent_angles_rejected():
    with pytest.raises(ValueError):
        triplet_separation_probability(TripletAngles(math.pi / 2, 0.0, 0.0))
    with pytest.raises(ValueError):
        TripletAngles(2.0, 0.0, 0.0)  # obtuse angle out of range


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_triplet_probabilities_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    v = np.abs(rng.standard_normal((3, 4)))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    a = TripletAngles.from_vectors(v[0], v[1], v[2])
    p = triplet_separation_probability(a)
    assert min(p) >= -1e-12
    assert sum(p) == pytest.approx(1.0, abs=1e-12)


def test_mc_matches_closed_form():
    v = np.eye(3)
    emp = mc_verify_triplet(v[0], v[1], v[2], 200000, 0)
    for f in emp:
        assert abs(f - 0.25) < 4 * math.sqrt(0.25 * 0.75 / 200000)
    emp = mc_verify_triplet(v[0], v[0], v[0], 1000, 0)
    assert emp[3] == 1.0
    # two-vector case: together with probability 1 - theta/pi
    u = np.array([1.0, 0.0, 0.0])
    w = np.array([np.cos(0.9), np.sin(0.9), 0.0])
    emp = mc_verify_triplet(u, w, w, 200000, 1)
    assert abs(emp[3] - (1 - 0.9 / math.pi)) < 4 * math.sqrt(0.25 / 200000)


def test_factor_revealing_bound_examples():
    assert factor_revealing_lower_bound(10, math.pi / 2) == pytest.approx(0.0)
    assert factor_revealing_lower_bound(10, 0.0) == pytest.approx(2.0)
    assert factor_revealing_lower_bound(10, 0.53268) == pytest.approx(8 * 0.16523, abs=1e-4)
    theta = math.acos(1 - 0.139)
    assert factor_revealing_lower_bound(10, theta) == pytest.approx(8 * 0.1651, abs=1e-3)


def test_factor_revealing_numeric_dominates_bound():
    for n in (3, 4, 7, 12, 30):
        for tb in np.arange(0.0, 1.51, 0.3):
            num = factor_revealing_numeric(n, float(tb))
            assert num >= factor_revealing_lower_bound(n, float(tb)) - 1e-6
    # theta_bar = 0 forces the {0, pi/2} structure and the bound is tight
    assert factor_revealing_numeric(6, 0.0) == pytest.approx(1.0)
    assert factor_revealing_numeric(4, 0.5) == pytest.approx(
        2 * (0.25 - 0.5 / (2 * math.pi)), abs=1e-9
    )
    with pytest.raises(ValueError):
        factor_revealing_numeric(2, 0.0)


def test_alpha_similarity_values():
    assert alpha_similarity(0.139) == pytest.approx(0.336379, abs=5e-5)
    assert alpha_similarity(1e-5) == pytest.approx(1 / 3, abs=1e-3)
    with pytest.raises(ValueError):
        alpha_similarity(0.9)  # balancing has no root this far out


def test_optimize_alpha_similarity():
    eps2, alpha = optimize_alpha_similarity()
    assert 0.13 <= eps2 <= 0.15
    assert alpha == pytest.approx(0.336379, abs=5e-5)
    assert alpha > 1 / 3 + 0.003


def test_mid_level():
    assert mid_level(20) == 9
    assert mid_level(4) == 1
    assert mid_level(3) == 1


def test_sdp_first_random_next_basics():
    g = make_random_instance(2, 1.0, "unit", 0)
    assert sdp_first_random_next(g, 0).root == (0, 1)
    g = make_random_instance(6, 0.8, "uniform01", 4)
    t1 = sdp_first_random_next(g, 7)
    t2 = sdp_first_random_next(g, 7)
    assert t1.root == t2.root
    assert isinstance(t1, Dendrogram) and t1.n == 6


def test_best_of_similarity_dominates_runs():
    g = make_random_instance(6, 0.8, "uniform01", 2)
    tree, val = best_of_similarity(g, 3, 1)
    assert val == similarity_reward(g, tree)
    _, one = best_of_similarity(g, 1, 1)
    assert val >= one
