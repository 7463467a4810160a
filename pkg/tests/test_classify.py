import json
import math
from fractions import Fraction

import numpy as np
import pytest

from bifdim.classify import (DEGENERATE, HYPERBOLIC, REPELLING, SUPERPOLYNOMIAL, TANGENT_MONOTONE,
                             TANGENT_OSCILLATING, check_bifurcation_conditions, classify_fixed_point,
                             predict_and_measure)
from bifdim.dynamics import MapSystem, find_cycles
from bifdim.errors import PreconditionError
from bifdim.exprmap import parse

LOG = MapSystem.logistic


def coherent(c):
    if c.kind == TANGENT_MONOTONE:
        a = c.alpha
        return c.predicted_dim == 1 - Fraction(1, a) and c.predicted_beta == Fraction(1, a - 1)
    if c.kind == TANGENT_OSCILLATING:
        a = c.alpha
        return (c.predicted_dim == 1 - Fraction(1, 2 * a - 1)
                and c.predicted_beta == Fraction(1, 2 * a - 2))
    if c.kind == HYPERBOLIC:
        return c.predicted_dim == 0
    return True


def test_logistic_examples():
    c = classify_fixed_point(LOG(2.5), 0.6)
    assert c.kind == HYPERBOLIC and c.predicted_dim == 0
    assert c.multiplier == pytest.approx(-0.5)

    c = classify_fixed_point(LOG(1.0), 0.0)
    assert (c.kind, c.alpha, c.predicted_dim, c.predicted_beta) == (TANGENT_MONOTONE, 2, Fraction(1, 2), 1)
    assert c.side == "right" and c.order == 2 and c.leading == pytest.approx(-2.0)

    c = classify_fixed_point(LOG(3.0), 2 / 3)
    assert (c.kind, c.alpha) == (TANGENT_OSCILLATING, 2)
    assert c.predicted_dim == Fraction(2, 3) and c.predicted_beta == Fraction(1, 2)
    assert c.oscillating

    assert classify_fixed_point(LOG(3.0), 0.0).kind == REPELLING


def test_cycle_examples():
    lam = 1 + math.sqrt(8)
    for cyc in find_cycles(LOG(lam), 3, 0, 1):
        c = classify_fixed_point(LOG(lam).with_power(3), cyc.points[0])
        assert (c.kind, c.alpha, c.predicted_dim) == (TANGENT_MONOTONE, 2, Fraction(1, 2))
    lam = 1 + math.sqrt(6)
    cycles = find_cycles(LOG(lam), 2, 0, 1)
    assert len(cycles) == 1
    for p in cycles[0].points:
        c = classify_fixed_point(LOG(lam).with_power(2), p)
        assert (c.kind, c.predicted_dim) == (TANGENT_OSCILLATING, Fraction(2, 3))


def test_identity_is_superpolynomial():
    c = classify_fixed_point(MapSystem.custom("x", 0.0), 0.0)
    assert c.kind == SUPERPOLYNOMIAL and c.tentative and c.predicted_dim == 1


def test_flat_to_max_order_is_superpolynomial():
    c = classify_fixed_point(MapSystem.recursion("x^9"), 0.0, max_order=8)
    assert c.kind == SUPERPOLYNOMIAL
    c = classify_fixed_point(MapSystem.recursion("x^9"), 0.0, max_order=9)
    assert (c.kind, c.alpha, c.predicted_dim) == (TANGENT_MONOTONE, 9, Fraction(8, 9))


@pytest.mark.parametrize("f,alpha,side", [("x^2", 2, "right"), ("-x^2", 2, "left"),
                                          ("x^3", 3, "both"), ("-x^3", 3, "none"),
                                          ("x^4 + x^5", 4, "right")])
def test_monotone_recursions(f, alpha, side):
    c = classify_fixed_point(MapSystem.recursion(f), 0.0)
    assert (c.kind, c.alpha, c.side) == (TANGENT_MONOTONE, alpha, side)
    assert coherent(c)


@pytest.mark.parametrize("f,order,alpha,side", [
    ("x^2", 3, 2, "both"),
    ("x^4", 7, 4, "both"),
    # odd f: the two half-steps add, F^2 = x + 2x^3 + ..., and the point repels
    ("x^3", 3, 2, "none"),
    ("-x^3", 3, 2, "both"),
])
def test_oscillating_recursions(f, order, alpha, side):
    c = classify_fixed_point(MapSystem.recursion(f, oscillating=True), 0.0)
    assert (c.kind, c.order, c.alpha, c.side) == (TANGENT_OSCILLATING, order, alpha, side)
    assert coherent(c)


def test_cancelling_cubic_gives_fifth_order():
    c = classify_fixed_point(MapSystem.custom("-x + x^2 - x^3", 0.0), 0.0)
    assert (c.kind, c.order, c.alpha, c.predicted_dim) == (TANGENT_OSCILLATING, 5, 3, Fraction(4, 5))


def test_second_iterate_order_is_odd():
    # F^2 commutes with an orientation-reversing F, so an even leading order never appears
    rng = np.random.default_rng(4)
    for _ in range(40):
        c2, c3, c4 = rng.integers(-3, 4, 3)
        c = classify_fixed_point(MapSystem.custom(f"-x + {c2}*x^2 + {c3}*x^3 + {c4}*x^4", 0.0), 0.0)
        assert c.kind != DEGENERATE
        assert c.order is None or c.order % 2 == 1


def test_formula_coherence_over_many_points():
    seen = set()
    cases = [(LOG(l), x) for l in (0.5, 1.0, 2.0, 2.5, 3.0, 3.5) for x in (0.0, 1 - 1 / l)]
    cases += [(MapSystem.recursion(f), 0.0) for f in ("x^2", "x^3", "2*x^2", "x^5")]
    cases += [(MapSystem.recursion(f, True), 0.0) for f in ("x^2", "x^3", "x^5")]
    for m, x in cases:
        c = classify_fixed_point(m, x)
        seen.add(c.kind)
        assert coherent(c), c
    assert {HYPERBOLIC, REPELLING, TANGENT_MONOTONE, TANGENT_OSCILLATING} <= seen


def test_oscillating_reduces_under_second_power():
    c1 = classify_fixed_point(LOG(3.0), 2 / 3)
    c2 = classify_fixed_point(LOG(3.0).with_power(2), 2 / 3)
    assert c2.kind == TANGENT_MONOTONE
    assert c2.alpha == 2 * c1.alpha - 1
    assert c2.predicted_dim == c1.predicted_dim


@pytest.mark.parametrize("lam,x0", [(1.0, 0.0), (3.0, 2 / 3), (2.5, 0.6), (3.2, 1 - 1 / 3.2)])
@pytest.mark.parametrize("s", [0.0, 0.3])
def test_affine_conjugation_invariance(lam, x0, s):
    c = 2.0
    conj = MapSystem.custom(f"{c}*(lam*((x-{s})/{c})*(1-(x-{s})/{c})) + {s}", lam)
    a = classify_fixed_point(LOG(lam), x0)
    b = classify_fixed_point(conj, c * x0 + s)
    assert (a.kind, a.alpha, a.predicted_dim) == (b.kind, b.alpha, b.predicted_dim)
    assert a.multiplier == pytest.approx(b.multiplier, abs=1e-12)


@pytest.mark.parametrize("d", [-1e-12, 0.0, 1e-12])
def test_tolerance_band(d):
    lam = 3.0 + d
    c = classify_fixed_point(LOG(lam), 1 - 1 / lam)
    assert c.kind == TANGENT_OSCILLATING and c.predicted_dim == Fraction(2, 3)
    assert check_bifurcation_conditions(LOG(lam), lam, 1 - 1 / lam).verdict == "period_doubling"


def test_detuned_is_not_snapped():
    assert classify_fixed_point(LOG(3.0001), 1 - 1 / 3.0001).kind == REPELLING
    assert classify_fixed_point(LOG(2.9999), 1 - 1 / 2.9999).kind == HYPERBOLIC


def test_classify_preconditions():
    with pytest.raises(PreconditionError):
        classify_fixed_point(LOG(3.0), 0.5)
    with pytest.raises(PreconditionError):
        classify_fixed_point(LOG(3.0), 2 / 3, max_order=1)
    with pytest.raises(PreconditionError):
        classify_fixed_point(LOG(3.0), 2 / 3, tol=0.0)


def test_classification_json():
    d = classify_fixed_point(LOG(3.0), 2 / 3).to_dict()
    assert json.loads(json.dumps(d))["kind"] == TANGENT_OSCILLATING
    assert d["predicted_dim"] == pytest.approx(2 / 3)


def fd_conditions(F, lam, x, h=1e-3):
    """Finite-difference oracle for the six bifurcation quantities."""
    def F2(l, y):
        return F(l, F(l, y))

    def dx(f, l, y, h=h):
        return (f(l, y + h) - f(l, y - h)) / (2 * h)

    d2 = (F(lam, x + h) - 2 * F(lam, x) + F(lam, x - h)) / h ** 2
    dl = (F(lam + h, x) - F(lam - h, x)) / (2 * h)
    mixed = (dx(F2, lam + h, x) - dx(F2, lam - h, x)) / (2 * h)
    H = 1e-2
    d3 = (F2(lam, x + 2 * H) - 2 * F2(lam, x + H) + 2 * F2(lam, x - H) - F2(lam, x - 2 * H)) / (2 * H ** 3)
    return {"d2F/dx2": d2, "dF/dlam": dl, "d2(F^2)/dlam dx": mixed, "d3(F^2)/dx3": d3}


def test_period_doubling_logistic():
    r = check_bifurcation_conditions(LOG(3.0), 3.0, 2 / 3)
    assert r.verdict == "period_doubling"
    assert r["dF/dx + 1"].satisfied and r["d3(F^2)/dx3"].satisfied
    fd = fd_conditions(lambda l, x: l * x * (1 - x), 3.0, 2 / 3)
    for name, v in fd.items():
        assert r[name].value == pytest.approx(v, rel=1e-3, abs=1e-6), name
    assert r["d2F/dx2"].value == pytest.approx(-6.0)
    assert r["dF/dlam"].value == pytest.approx(2 / 9)


def test_saddle_node_exponential():
    r = check_bifurcation_conditions(parse("lam*exp(x)"), math.exp(-1), 1.0)
    assert r.verdict == "saddle_node"
    assert r["d2F/dx2"].value == pytest.approx(1.0)
    assert r["dF/dlam"].value == pytest.approx(math.e)
    fd = fd_conditions(lambda l, x: l * math.exp(x), math.exp(-1), 1.0)
    for name, v in fd.items():
        assert r[name].value == pytest.approx(v, rel=1e-3, abs=1e-6), name


def test_inconclusive_cases():
    r = check_bifurcation_conditions(parse("x"), 0.7, 0.0)
    assert r.verdict == "inconclusive" and not r["dF/dlam"].satisfied
    r = check_bifurcation_conditions(LOG(1.0), 1.0, 0.0)
    assert r.verdict == "inconclusive"
    assert r["dF/dx - 1"].satisfied and not r["dF/dlam"].satisfied
    assert classify_fixed_point(LOG(1.0), 0.0).kind == TANGENT_MONOTONE
    with pytest.raises(PreconditionError):
        check_bifurcation_conditions(LOG(3.0), 3.0, 0.5)
    assert len(r.to_dict()["conditions"]) == 6


def test_predict_and_measure_small():
    m = predict_and_measure(LOG(3.0), 2 / 3, 0.5, 10**5)
    assert m.error is None and m.predicted_dim == Fraction(2, 3)
    assert m.decay.beta == pytest.approx(0.5, abs=0.05)
    assert m.sausage.d == pytest.approx(2 / 3, abs=0.06)
    assert m.tricot.d == pytest.approx(2 / 3, abs=0.08)
    json.dumps(m.to_dict())


def test_predict_and_measure_errors():
    m = predict_and_measure(LOG(3.0), 0.0, 0.5, 1000)
    assert m.error and m.sausage is None
    m = predict_and_measure(LOG(2.5), 0.0, 0.5, 1000)  # repelling target, no prediction
    assert m.error
    m = predict_and_measure(LOG(1.0), 0.0, -0.05, 1000)  # wrong side: orbit escapes
    assert m.error


def test_predict_and_measure_hyperbolic():
    m = predict_and_measure(LOG(2.5), 0.6, 0.3, 10**4)
    assert m.error is None and m.predicted_dim == 0
    assert m.sausage.d <= 0.1
