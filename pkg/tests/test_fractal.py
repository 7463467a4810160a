import math

import numpy as np
import pytest

from bifdim.dynamics import MapSystem, iterate
from bifdim.errors import PreconditionError
from bifdim.fractal import (PointSet, conjectured_content, content_bounds, content_estimate,
                            default_window, dim_sausage, dim_tricot, envelope_constants,
                            fit_decay_exponent, sausage_measure)

N6 = np.arange(1, 10**6 + 1, dtype=float)


def merge_sweep(points, eps, segments=()):
    """Oracle: sort the intervals, merge overlaps left to right, add lengths."""
    ivs = sorted([(p - eps, p + eps) for p in points] + [(a - eps, b + eps) for a, b in segments])
    total, (lo, hi) = 0.0, ivs[0]
    for a, b in ivs[1:]:
        if a <= hi:
            hi = max(hi, b)
        else:
            total += hi - lo
            lo, hi = a, b
    return total + hi - lo


def test_pointset_sorted_dedup():
    s = PointSet([3.0, 1.0, 2.0, 1.0, 1.0 + 1e-17])
    assert s.pts.tolist() == [1.0, 2.0, 3.0]
    assert s.diameter == 2.0
    with pytest.raises(PreconditionError):
        PointSet([1.0, math.nan])


def test_sausage_examples():
    s = PointSet([0.0, 1.0])
    assert sausage_measure(s, 0.25) == 1.0
    assert sausage_measure(s, 0.6) == pytest.approx(2.2)
    for eps in (1e-9, 0.3, 7.0):
        assert sausage_measure(PointSet([0.4]), eps) == 2 * eps
    with pytest.raises(PreconditionError):
        sausage_measure(PointSet([]), 0.1)
    with pytest.raises(PreconditionError):
        sausage_measure(s, 0.0)


def test_sausage_matches_merge_sweep():
    rng = np.random.default_rng(5)
    for _ in range(200):
        pts = rng.uniform(-1, 1, rng.integers(1, 300))
        segs = [tuple(sorted(rng.uniform(-1, 1, 2))) for _ in range(rng.integers(0, 3))]
        eps = 10 ** rng.uniform(-5, 0)
        got = sausage_measure(PointSet(pts, segments=segs), eps)
        assert got == pytest.approx(merge_sweep(pts, eps, segs), rel=1e-12)


def test_sausage_monte_carlo_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        pts = np.sort(rng.uniform(0, 1, rng.integers(1, 201)))
        eps = 10 ** rng.uniform(-3, -0.5)
        lo, hi = pts[0] - eps, pts[-1] + eps
        u = rng.uniform(lo, hi, 10**6)
        k = np.clip(np.searchsorted(pts, u), 1, len(pts) - 1)
        near = np.minimum(np.abs(u - pts[k - 1]), np.abs(u - pts[k]))
        if len(pts) == 1:
            near = np.abs(u - pts[0])
        mc = (hi - lo) * np.mean(near < eps)
        exact = sausage_measure(PointSet(pts), eps)
        assert abs(mc - exact) <= 0.01 * exact


def test_sausage_bounds_and_monotonicity():
    rng = np.random.default_rng(11)
    for _ in range(50):
        s = PointSet(rng.normal(size=rng.integers(1, 100)))
        eps = np.sort(10 ** rng.uniform(-4, 1, 40))
        m = sausage_measure(s, eps)
        assert np.all(np.diff(m) >= 0)
        assert np.all(m >= 2 * eps * (1 - 1e-15))
        assert np.all(m <= 2 * eps * len(s) * (1 + 1e-15))
        assert np.all(m <= (s.diameter + 2 * eps) * (1 + 1e-15))


def test_scale_equivariance():
    rng = np.random.default_rng(3)
    for _ in range(30):
        pts = rng.uniform(-5, 5, 500)
        eps = 10 ** rng.uniform(-4, 0)
        base = sausage_measure(PointSet(pts), eps)
        for c in (2.0, 0.125, 1024.0):
            assert sausage_measure(PointSet(c * pts), c * eps) == c * base
        for c in (3.0, 0.7, 1e-3):
            assert sausage_measure(PointSet(c * pts), c * eps) == pytest.approx(c * base, rel=1e-12)


def test_dimension_invariant_under_affine_rescaling():
    a = N6[:10**5] ** -1.0
    d0 = dim_sausage(PointSet(a)).d
    for c, t in ((3.0, 0.0), (0.01, 5.0), (-2.0, 1.0)):
        assert dim_sausage(PointSet(c * a + t)).d == pytest.approx(d0, abs=0.01)
        assert dim_tricot(np.abs(c) * a).d == pytest.approx(dim_tricot(a).d, abs=0.01 + abs(math.log(abs(c))) / math.log(10**4))


def test_separated_union_additivity():
    rng = np.random.default_rng(8)
    for _ in range(30):
        c, eps = 0.3, 10 ** rng.uniform(-4, -2)
        plus = c + eps + rng.uniform(0.0001, 1, 50)
        minus = c - eps - rng.uniform(0.0001, 1, 50)
        both = sausage_measure(PointSet(np.r_[plus, minus]), eps)
        parts = sausage_measure(PointSet(plus), eps) + sausage_measure(PointSet(minus), eps)
        assert both == pytest.approx(parts, rel=1e-12)


def test_union_touching_at_zero():
    # S+ = {1/n}, S- = {-1/n}, both containing 0: overlap is exactly (-eps, eps)
    a = 1.0 / np.arange(1, 2001)
    splus, sminus = np.r_[a, 0.0], np.r_[-a, 0.0]
    for eps in (1e-4, 3e-5):
        assert eps < a[-1]
        u = sausage_measure(PointSet(np.r_[splus, sminus]), eps)
        v = sausage_measure(PointSet(splus), eps) + sausage_measure(PointSet(sminus), eps) - 2 * eps
        assert u == pytest.approx(v, rel=1e-12)


@pytest.mark.parametrize("beta,want", [(1.0, 0.5), (0.5, 2 / 3), (1 / 3, 0.75), (2.0, 1 / 3)])
def test_power_sets(beta, want):
    a = N6 ** -beta
    assert dim_sausage(PointSet(a)).d == pytest.approx(want, abs=0.03)
    assert dim_sausage(PointSet(a, segments=[(0.0, a[-1])])).d == pytest.approx(want, abs=0.005)
    assert dim_tricot(a).d == pytest.approx(want, abs=1e-9)


def test_explicit_windows():
    assert dim_sausage(PointSet(1 / N6), 1e-2, 1e-5).d == pytest.approx(0.5, abs=0.03)
    assert dim_sausage(PointSet(N6 ** -0.5), 1e-2, 1e-5).d == pytest.approx(2 / 3, abs=0.03)
    est = dim_sausage(PointSet(2.0 ** -np.arange(1, 51)), 1e-2, 1e-12)
    assert est.d <= 0.1
    assert est.window == (1e-12, 1e-2) and est.samples == 48
    assert 0 <= est.fit_r2 <= 1


def test_dim_sausage_validation_and_degenerate():
    s = PointSet(1 / N6[:1000])
    with pytest.raises(PreconditionError):
        dim_sausage(s, 1e-5, 1e-2)
    with pytest.raises(PreconditionError):
        dim_sausage(s, 1e-2, 1e-5, samples=4)
    single = dim_sausage(PointSet([0.3]))
    assert single.d == pytest.approx(0.0, abs=1e-9)
    lo, hi = default_window(PointSet([0.3]))
    assert 0 < lo < hi


def test_default_window_inside_set_scale():
    s = PointSet(1 / N6)
    lo, hi = default_window(s)
    assert s.gaps[0] < 2 * lo < 2 * hi < s.diameter / 10


def test_tricot_examples_and_errors():
    assert dim_tricot(1 / N6).d == 0.5
    est = dim_tricot(N6 ** -0.5)
    assert est.d == pytest.approx(2 / 3, abs=1e-12)
    assert est.window == (10**5, 10**6) and est.spread == pytest.approx(0, abs=1e-12)
    with pytest.raises(PreconditionError):
        dim_tricot(np.r_[1 / N6[:100], 0.0])
    with pytest.raises(PreconditionError):
        dim_tricot([0.5, 0.4, 0.4, 0.1])
    # decreasing, but the gaps alternate wildly
    bumpy = 1 / N6[:1000] + 0.5 * (N6[:1000] % 2 == 1) / N6[:1000] ** 2
    assert np.all(np.diff(bumpy) < 0)
    with pytest.raises(PreconditionError):
        dim_tricot(bumpy)


def test_tricot_index_for_subsequences():
    a = 1 / N6
    est = dim_tricot(a[1::2], index=N6[1::2])
    assert est.d == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(PreconditionError):
        dim_tricot(a[:10], index=N6[:9])


def test_comparison_principle():
    rng = np.random.default_rng(99)
    n = N6[:20000]
    for _ in range(50):
        b1, b2 = sorted(rng.uniform(0.2, 3.0, 2))
        c2 = rng.uniform(0.5, 2.0)
        c1 = c2 * rng.uniform(0.05, 1.0)
        a = c1 * n ** -b2  # faster decay, smaller amplitude
        b = c2 * n ** -b1
        assert np.all(a <= b)
        assert dim_tricot(a).d <= dim_tricot(b).d + 0.01


def test_fit_decay_and_envelope():
    n = N6[:10000]
    fit = fit_decay_exponent(3 / n, 1)
    assert fit.beta == pytest.approx(1.0, abs=1e-12)
    assert fit.c == pytest.approx(3.0, rel=1e-10)
    assert fit.fit_r2 == pytest.approx(1.0)
    assert envelope_constants(1 / n, 1.0, 1) == pytest.approx((1.0, 1.0))
    osc = (2 + (-1) ** n) / n
    assert envelope_constants(osc, 1.0, 2) == pytest.approx((1.0, 3.0))
    with pytest.raises(PreconditionError):
        fit_decay_exponent(1 / n[:10], 5)
    with pytest.raises(PreconditionError):
        fit_decay_exponent(np.r_[1.0, -1.0, 0.5, 0.2, 0.1], 1)


def test_orbit_decay_and_envelope():
    o = iterate(MapSystem.logistic(1.0), 0.05, 10**5)
    fit = fit_decay_exponent(o.xs[1000:], 1001, index=N6[1000:10**5])
    assert fit.beta == pytest.approx(1.0, abs=0.05)
    lo, hi = envelope_constants(o.xs, 1.0, 1000)
    assert 0 < lo <= hi < math.inf


def test_estimator_agreement_on_orbits():
    for m, x1 in ((MapSystem.logistic(1.0), 0.05), (MapSystem.recursion("x^3"), 0.5)):
        xs = iterate(m, x1, 10**6).xs
        burn = 10**4
        ds = dim_sausage(PointSet(xs)).d
        dt = dim_tricot(xs[burn:], index=N6[burn:len(xs)]).d
        assert abs(ds - dt) <= 0.05


def test_content_examples():
    c = content_estimate(PointSet([0.7]), 0.0)
    assert c.lower == pytest.approx(2.0) and c.upper == pytest.approx(2.0)
    geo = PointSet(2.0 ** -np.arange(1, 51))
    # a set of dimension 0 has vanishing half-dimensional content
    assert content_estimate(geo, 0.5, 1e-2, 1e-12).lower < 1e-3
    with pytest.raises(PreconditionError):
        content_estimate(geo, 1.5)


def test_content_of_quadratic_recursion():
    xs = iterate(MapSystem.recursion("x^2"), 0.5, 10**6).xs
    c = content_estimate(PointSet(xs), 0.5)
    target = conjectured_content(1.0, 2.0)
    assert abs(c.lower - target) <= 0.15 * target
    assert abs(c.upper - target) <= 0.15 * target


def test_content_bounds_arithmetic():
    lo, hi = content_bounds(1, 1, 1, 1, 2)
    assert lo == pytest.approx(2 * math.sqrt(2), abs=1e-15)
    assert hi == pytest.approx(2 * math.sqrt(2), abs=1e-15)
    lo, _ = content_bounds(1, 2, 0.5, 1, 2)
    assert lo == pytest.approx(0.5 + 2 * math.sqrt(0.125), abs=1e-12)
    assert lo == pytest.approx(1.2071, abs=1e-4)
    rng = np.random.default_rng(1)
    for _ in range(200):
        A = rng.uniform(0.1, 5)
        B = A * rng.uniform(1, 3)
        a = rng.uniform(0.1, 2)
        b = a * rng.uniform(1, 3)
        lo, hi = content_bounds(A, B, a, b, rng.uniform(1.1, 6))
        assert lo <= hi
    for bad in ((2, 1, 1, 1, 2), (1, 1, 2, 1, 2), (1, 1, 1, 1, 1), (0, 1, 1, 1, 2)):
        with pytest.raises(PreconditionError):
            content_bounds(*bad)


def test_conjectured_content():
    assert conjectured_content(1, 2) == pytest.approx(2 * math.sqrt(2))
    assert conjectured_content(2, 2) == pytest.approx(2.0)
    vals = [conjectured_content(1.0, a) for a in (1.5, 2, 4, 10, 100, 1e4)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(PreconditionError):
        conjectured_content(1, 1)
