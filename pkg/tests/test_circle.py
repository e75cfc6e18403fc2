import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdplab.circle import (CircleScheme, FrontierPoint, lower_convex_hull,
                           one_shot_frontier, simulate_dithered_circle,
                           simulate_staggered_circle, staggered_circle_rd,
                           two_cell_objective, two_cell_objective_prime,
                           verify_two_cell_optimality, wrap_angle)
from rdplab.metrics import ks_threshold
from rdplab.rng import SampleStreams

BASELINE_DETERMINISTIC = 2.0 - 8.0 / math.pi ** 2     # L=2, N=1
BASELINE_DITHERED = 2.0 - 4.0 / math.pi               # L=2, N -> inf


def closed_form_distortion(levels, offsets):
    """Independent re-derivation used as the oracle for the simulators."""
    def sinc(x):
        return math.sin(x) / x
    if levels == 1:
        return 2.0
    return 2.0 - 2.0 * sinc(math.pi / (levels * offsets)) * sinc(math.pi / levels)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_wrap_angle_range_and_period(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi + 1e-12
    assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)


def test_wrap_angle_endpoints():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.0) == 0.0


def test_closed_form_baselines():
    p = staggered_circle_rd(2, 1)
    assert p.rate_bits == 1.0
    assert p.distortion == pytest.approx(BASELINE_DETERMINISTIC, abs=1e-15)
    for offsets in (1, 3, 10):
        p = staggered_circle_rd(1, offsets)
        assert (p.rate_bits, p.distortion) == (0.0, 2.0)
    assert staggered_circle_rd(2, 2).distortion == pytest.approx(
        0.8536816634984874, abs=1e-12)


def test_closed_form_matches_independent_expression():
    for levels in (2, 3, 4, 8):
        for offsets in (1, 2, 5, 16):
            got = staggered_circle_rd(levels, offsets).distortion
            assert got == pytest.approx(closed_form_distortion(levels, offsets),
                                        abs=1e-14)


def test_closed_form_monotone_in_levels_and_offsets():
    for levels in (2, 4, 8):
        d = [staggered_circle_rd(levels, n).distortion for n in (1, 2, 4, 16)]
        assert all(a > b for a, b in zip(d, d[1:]))
    for offsets in (1, 2, 4, 16):
        d = [staggered_circle_rd(lv, offsets).distortion for lv in (2, 4, 8)]
        assert all(a > b for a, b in zip(d, d[1:]))


def test_many_offsets_approach_dithered_limit():
    for levels in (2, 4, 8):
        lim = one_shot_frontier(levels)[-1].distortion
        assert abs(staggered_circle_rd(levels, 10_000).distortion - lim) < 1e-6


def test_one_shot_frontier_points():
    points = one_shot_frontier(2)
    assert (points[0].rate_bits, points[0].distortion) == (0.0, 2.0)
    assert points[1].rate_bits == 1.0
    assert points[1].distortion == pytest.approx(BASELINE_DITHERED, abs=1e-15)
    with pytest.raises(ValueError):
        one_shot_frontier(0)


def test_every_extreme_point_is_a_hull_vertex():
    points = one_shot_frontier(64)
    hull = lower_convex_hull(points)
    assert hull == points


def test_simulated_staggered_matches_closed_form():
    for levels, offsets, seed in ((2, 1, 7), (2, 4, 8), (4, 2, 9)):
        scheme = CircleScheme("staggered", levels, offsets)
        res = simulate_staggered_circle(scheme, 200_000, SampleStreams(seed))
        target = closed_form_distortion(levels, offsets)
        assert abs(res.mse - target) <= res.mc_radius_mse
        assert res.perception_ks < ks_threshold(res.n_samples)
        assert res.rate_bits == pytest.approx(math.log2(levels), abs=1e-3)


def test_simulated_dithered_matches_extreme_points():
    for levels, seed in ((2, 17), (4, 18)):
        res = simulate_dithered_circle(levels, 200_000, SampleStreams(seed))
        target = closed_form_distortion(levels, 10**9)
        assert abs(res.mse - target) <= res.mc_radius_mse
        assert res.perception_ks < ks_threshold(res.n_samples)
        assert res.rate_bits == math.log2(levels)
        assert res.index_entropy_bits == pytest.approx(math.log2(levels), abs=1e-3)


def test_dithered_l4_value():
    res = simulate_dithered_circle(4, 200_000, SampleStreams(4))
    assert abs(res.mse - 0.1993673676857879) <= res.mc_radius_mse


def test_simulation_is_deterministic():
    scheme = CircleScheme("staggered", 2, 2)
    a = simulate_staggered_circle(scheme, 10_240, SampleStreams(42))
    b = simulate_staggered_circle(scheme, 10_240, SampleStreams(42))
    assert a == b


def test_scheme_validation():
    with pytest.raises(ValueError):
        CircleScheme("foo", 2, 1)
    with pytest.raises(ValueError):
        CircleScheme("staggered", 0, 1)
    with pytest.raises(ValueError):
        simulate_staggered_circle(CircleScheme("dithered", 2), 10, SampleStreams(0))
    with pytest.raises(ValueError):
        FrontierPoint(-0.5, 1.0, "closed-form", "")
    with pytest.raises(ValueError):
        FrontierPoint(1.0, 4.5, "closed-form", "")


# -- two adjacent cells ------------------------------------------------------

def test_two_cell_objective_symmetric():
    r, lam = 0.7, 6.0
    alpha = r * np.arange(1, 2000) / 2000.0
    vals = two_cell_objective(alpha, r, lam)
    assert np.max(np.abs(vals - vals[::-1])) <= 1e-12


def test_two_cell_derivative_matches_finite_difference():
    rng = np.random.default_rng(0)
    h = 1e-6
    for _ in range(100):
        r = rng.uniform(0.1, 1.0)
        lam = rng.uniform(0.1, 20.0)
        alpha = rng.uniform(0.2, 0.8) * r
        fd = (two_cell_objective(alpha + h, r, lam)
              - two_cell_objective(alpha - h, r, lam)) / (2 * h)
        assert fd == pytest.approx(
            float(two_cell_objective_prime(alpha, r, lam)), abs=1e-6)


def test_two_cell_midpoint_optimum():
    rep = verify_two_cell_optimality(0.5, 10.0, 100_000)
    assert rep.is_midpoint and not rep.boundary_optimum
    assert abs(rep.alpha_opt - 0.25) <= rep.grid_step


def test_two_cell_small_lambda_degenerates():
    rep = verify_two_cell_optimality(0.5, 0.5, 10_001)
    assert rep.boundary_optimum and not rep.is_midpoint


def test_two_cell_input_validation():
    with pytest.raises(ValueError):
        verify_two_cell_optimality(1.5, 10.0, 100)
    with pytest.raises(ValueError):
        verify_two_cell_optimality(0.5, -1.0, 100)
    with pytest.raises(ValueError):
        verify_two_cell_optimality(0.5, 10.0, 2)
