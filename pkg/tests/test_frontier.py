import math

import numpy as np
import pytest
import scipy.integrate

from rdplab.circle import one_shot_frontier
from rdplab.frontier import (VonMisesLikeLaw, gaussian_rdp_reference,
                             one_shot_overhead_bound, rate_at_distortion,
                             rdp_curve, rdp_point)

LAMBDAS = (0.01, 0.1, 1.0, 2.0, 10.0, 100.0)


def bessel_ratio_series(lam, terms=400):
    """I1(lam)/I0(lam) by direct series summation (independent oracle)."""
    half = lam / 2.0
    t = 1.0           # (lam/2)^(2k) / (k!)^2 at k = 0
    s0 = 0.0
    s1 = 0.0
    for k in range(terms):
        s0 += t
        s1 += t * half / (k + 1)
        t *= half * half / ((k + 1) * (k + 1))
        if t < 1e-18 * s0 and k > half:
            break
    return s1 / s0


def test_law_normalization():
    for lam in LAMBDAS:
        law = VonMisesLikeLaw(lam)
        total, _ = scipy.integrate.quad(law.pdf, -math.pi, math.pi,
                                        epsabs=1e-12, limit=400)
        assert total == pytest.approx(1.0, abs=1e-9), lam


def test_mean_cos_matches_bessel_ratio():
    for lam in LAMBDAS:
        got = VonMisesLikeLaw(lam).mean_cos()
        assert abs(got - bessel_ratio_series(lam)) <= 1e-8, lam


def test_rdp_point_small_lambda_endpoint():
    p = rdp_point(1e-8)
    assert abs(p.rate_bits - 0.0) < 1e-6
    assert abs(p.distortion - 2.0) < 1e-6


def test_rdp_point_at_lambda_two():
    # frozen against the Bessel identities: E[cos Z] = I1(2)/I0(2),
    # h = ln(2*pi*I0(2)) - 2*E[cos Z]
    p = rdp_point(2.0)
    law = VonMisesLikeLaw(2.0)
    assert law.mean_cos() == pytest.approx(0.6977746579640078, abs=1e-8)
    assert p.distortion == pytest.approx(0.6044506840719845, abs=1e-8)
    assert p.rate_bits == pytest.approx(0.8245806813834694, abs=1e-8)
    assert law.entropy_nats() == pytest.approx(1.2663212921212032, abs=1e-8)


def test_distortion_matches_rejection_sampling():
    rng = np.random.default_rng(2024)
    for lam in (1.0, 5.0):
        accepted = []
        while len(accepted) < 200_000:
            z = rng.uniform(-math.pi, math.pi, 500_000)
            u = rng.random(500_000)
            accepted.extend(z[u < np.exp(lam * (np.cos(z) - 1.0))].tolist())
        z = np.asarray(accepted[:200_000])
        d = 2.0 - 2.0 * np.cos(z)
        radius = 3.0 * d.std(ddof=1) / math.sqrt(d.size)
        assert abs(rdp_point(lam).distortion - d.mean()) <= radius


def test_curve_monotone_and_convex():
    grid = np.geomspace(0.01, 100.0, 41)
    points = rdp_curve(grid)
    rates = np.array([p.rate_bits for p in points])
    dists = np.array([p.distortion for p in points])
    assert np.all(np.diff(rates) > 0)
    assert np.all(np.diff(dists) < 0)
    # convexity in (D, R): middle point on or below the chord
    for k in range(1, len(points) - 1):
        t = (dists[k] - dists[k - 1]) / (dists[k + 1] - dists[k - 1])
        chord = rates[k - 1] + t * (rates[k + 1] - rates[k - 1])
        assert rates[k] <= chord + 1e-9


def test_one_shot_points_above_information_frontier():
    for point in one_shot_frontier(8)[1:]:
        reference = rate_at_distortion(point.distortion)
        assert point.rate_bits > reference


def test_frontier_ordering_chain():
    # at equal distortion: information frontier <= one-shot hull <= any
    # finite-offset staggered point
    from rdplab.circle import lower_convex_hull, staggered_circle_rd

    hull = lower_convex_hull(one_shot_frontier(64))
    hull_d = np.array([p.distortion for p in hull])[::-1]
    hull_r = np.array([p.rate_bits for p in hull])[::-1]

    def hull_rate(distortion):
        return float(np.interp(distortion, hull_d, hull_r))

    for levels in (2, 4, 8):
        for offsets in (1, 2, 4):
            point = staggered_circle_rd(levels, offsets)
            assert point.rate_bits >= hull_rate(point.distortion) - 1e-12
            assert point.rate_bits > rate_at_distortion(point.distortion)


def test_curve_input_validation():
    with pytest.raises(ValueError):
        rdp_point(0.0)
    with pytest.raises(ValueError):
        rdp_point(-1.0)
    with pytest.raises(ValueError):
        rdp_point(2e4)
    with pytest.raises(ValueError):
        rdp_curve([])
    with pytest.raises(ValueError):
        rdp_curve([1.0, 1.0])


def test_gaussian_reference_values():
    assert gaussian_rdp_reference(2.0, 1.0) == 0.0
    assert gaussian_rdp_reference(0.5, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert gaussian_rdp_reference(1.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        gaussian_rdp_reference(2.1, 1.0)
    with pytest.raises(ValueError):
        gaussian_rdp_reference(0.0, 1.0)
    with pytest.raises(ValueError):
        gaussian_rdp_reference(0.5, -1.0)


def test_overhead_bound_values():
    assert one_shot_overhead_bound(0.0) == 4.0
    assert one_shot_overhead_bound(1.0) == 6.0
    assert one_shot_overhead_bound(4.0) == pytest.approx(8.0 + math.log2(5.0),
                                                         abs=1e-12)
    assert one_shot_overhead_bound(4.0) == pytest.approx(10.321928, abs=1e-6)
    with pytest.raises(ValueError):
        one_shot_overhead_bound(-0.1)
