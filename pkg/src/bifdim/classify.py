"""Classify fixed points and cycles, check bifurcation hypotheses, and compare
predicted with measured dimensions of nearby orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import factorial
from typing import Optional, Union

import numpy as np

from . import fractal as fr
from .dynamics import Cycle, MapSystem, Orbit, burn_in, distance_sequence, iterate
from .errors import BifdimError, DomainError, PreconditionError
from .exprmap import MapExpr
from .jet import Jet

__all__ = [
    "Classification",
    "classify_fixed_point",
    "Condition",
    "BifurcationReport",
    "check_bifurcation_conditions",
    "Measurement",
    "predict_and_measure",
]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ORDER = 8

HYPERBOLIC = "hyperbolic"
REPELLING = "repelling"
TANGENT_MONOTONE = "tangent_monotone"
TANGENT_OSCILLATING = "tangent_oscillating"
SUPERPOLYNOMIAL = "superpolynomial_suspect"
DEGENERATE = "degenerate_unresolved"


def _num(v):
    return None if v is None else float(v)


def _frac(v):
    return None if v is None else str(v)


@dataclass(frozen=True)
class Classification:
    """Category of a fixed point of F^power with the predicted exponents.

    ``predicted_dim`` and ``predicted_beta`` are exact fractions.  ``order``
    and ``leading`` describe the first nonvanishing derivative beyond the
    first (of F for multiplier +1, of F^2 for multiplier -1); ``side`` says
    from where nearby orbits converge: "right", "left", "both" or "none".
    """

    kind: str
    x0: float
    multiplier: float
    power: int = 1
    alpha: Optional[int] = None
    predicted_dim: Optional[Fraction] = None
    predicted_beta: Optional[Fraction] = None
    order: Optional[int] = None
    leading: Optional[float] = None
    side: Optional[str] = None
    tentative: bool = False

    @property
    def oscillating(self):
        return self.kind == TANGENT_OSCILLATING

    def to_dict(self):
        return {
            "kind": self.kind,
            "x0": self.x0,
            "power": self.power,
            "multiplier": self.multiplier,
            "alpha": self.alpha,
            "predicted_dim": _num(self.predicted_dim),
            "predicted_dim_exact": _frac(self.predicted_dim),
            "predicted_beta": _num(self.predicted_beta),
            "predicted_beta_exact": _frac(self.predicted_beta),
            "order": self.order,
            "leading_derivative": self.leading,
            "side": self.side,
            "tentative": self.tentative,
        }


def _leading(jet, tol, start=2):
    """First k >= start with |d^k/dx^k| > tol, as (k, derivative)."""
    for k in range(start, jet.order + 1):
        v = jet.coeffs[k] * factorial(k)
        if abs(v) > tol:
            return k, v
    return None, None


def _side(k, value):
    # x -> x + c (x - x0)^k: orbits creep toward x0 where c (x - x0)^k < 0.
    if k % 2 == 0:
        return "right" if value < 0 else "left"
    return "both" if value < 0 else "none"


def classify_fixed_point(map: MapSystem, x0: float, max_order: int = DEFAULT_MAX_ORDER,
                         tol: float = DEFAULT_TOL) -> Classification:
    """Classify ``x0`` as a fixed point of the step map of ``map``."""
    if max_order < 2:
        raise PreconditionError("max_order must be >= 2")
    if not tol > 0:
        raise PreconditionError("tol must be positive")
    x0 = float(x0)
    fx = map.step(x0)
    if not abs(fx - x0) <= tol * (1.0 + abs(x0)):
        raise PreconditionError(f"{x0!r} is not a fixed point: F(x0) - x0 = {fx - x0:.3e}")
    jet = map.jet(x0, max_order)
    mu = jet.coeffs[1]
    base = dict(x0=x0, multiplier=mu, power=map.power)

    if abs(mu) < 1.0 - tol:
        return Classification(HYPERBOLIC, predicted_dim=Fraction(0), **base)
    if abs(mu) > 1.0 + tol:
        return Classification(REPELLING, **base)

    if abs(mu - 1.0) <= tol:
        k, v = _leading(jet, tol)
        if k is None:
            return Classification(SUPERPOLYNOMIAL, predicted_dim=Fraction(1), tentative=True, **base)
        return Classification(
            TANGENT_MONOTONE, alpha=k,
            predicted_dim=1 - Fraction(1, k), predicted_beta=Fraction(1, k - 1),
            order=k, leading=v, side=_side(k, v), **base)

    # Multiplier -1: look at the second iterate, x -> x + c (x - x0)^k + ...
    g = map.with_power(2 * map.power).jet(x0, max_order)
    k, v = _leading(g, tol)
    if k is None:
        return Classification(SUPERPOLYNOMIAL, predicted_dim=Fraction(1), tentative=True, **base)
    if k % 2 == 0:
        return Classification(DEGENERATE, order=k, leading=v, side=_side(k, v), **base)
    alpha = (k + 1) // 2
    return Classification(
        TANGENT_OSCILLATING, alpha=alpha,
        predicted_dim=1 - Fraction(1, 2 * alpha - 1),
        predicted_beta=Fraction(1, 2 * alpha - 2),
        order=k, leading=v, side=_side(k, v), **base)


# -- bifurcation hypotheses ---------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    name: str
    value: float
    requirement: str  # "zero" or "nonzero"
    satisfied: bool

    def to_dict(self):
        return {"expression": self.name, "value": self.value,
                "requirement": self.requirement, "satisfied": self.satisfied}


@dataclass(frozen=True)
class BifurcationReport:
    lambda0: float
    x0: float
    conditions: tuple
    verdict: str

    def __getitem__(self, name):
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"lambda0": self.lambda0, "x0": self.x0, "verdict": self.verdict,
                "conditions": [c.to_dict() for c in self.conditions]}


def _mixed_jets(system, lam0, x0, order=3):
    """Outer x-jet whose coefficients are first-order lam-jets, for F and F^2."""
    lam = Jet.variable(float(lam0), 1)
    x = Jet([Jet([float(x0), 0.0]), Jet([1.0, 0.0])] + [Jet([0.0, 0.0])] * (order - 1))
    try:
        f1 = system.compose(x, lam)
        f2 = system.compose(f1, lam)
    except DomainError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise DomainError(str(exc)) from exc
    return f1, f2


def _part(j, k, m):
    """d^k/dx^k d^m/dlam^m from a nested jet."""
    c = j.coeffs[k] if isinstance(j, Jet) and k < len(j.coeffs) else (j if k == 0 else 0.0)
    c = c.coeffs[m] if isinstance(c, Jet) and m < len(c.coeffs) else (c if m == 0 else 0.0)
    return float(c) * factorial(k) * factorial(m)


def check_bifurcation_conditions(family: Union[MapExpr, MapSystem], lambda0: float,
                                 x0: float) -> BifurcationReport:
    """Evaluate the saddle-node and period-doubling hypotheses at (lambda0, x0).

    Equalities hold within 1e-9 scale and nonzero means above 1e-7 scale,
    with scale = max(1, |lambda0|, |x0|).
    """
    if isinstance(family, MapExpr):
        system = MapSystem.custom(family, lambda0)
    else:
        system = replace(family, lam=float(lambda0))
    lambda0, x0 = float(lambda0), float(x0)
    scale = max(1.0, abs(lambda0), abs(x0))
    eq_tol, nz_tol = 1e-9 * scale, 1e-7 * scale
    f1, f2 = _mixed_jets(system, lambda0, x0)

    fx = _part(f1, 0, 0)
    if not abs(fx - x0) <= eq_tol:
        raise PreconditionError(f"({lambda0!r}, {x0!r}) is not a fixed point: F - x0 = {fx - x0:.3e}")
    mu = _part(f1, 1, 0)
    sign = 1.0 if mu >= 0 else -1.0

    def zero(name, v):
        return Condition(name, v, "zero", abs(v) <= eq_tol)

    def nonzero(name, v):
        return Condition(name, v, "nonzero", abs(v) > nz_tol)

    conds = (
        zero("F - x0", fx - x0),
        zero("dF/dx - 1" if sign > 0 else "dF/dx + 1", mu - sign),
        nonzero("d2F/dx2", _part(f1, 2, 0)),
        nonzero("dF/dlam", _part(f1, 0, 1)),
        nonzero("d2(F^2)/dlam dx", _part(f2, 1, 1)),
        nonzero("d3(F^2)/dx3", _part(f2, 3, 0)),
    )
    ok = {c.name: c.satisfied for c in conds}
    verdict = "inconclusive"
    if ok["F - x0"] and ok["d2F/dx2"]:
        if sign > 0 and ok["dF/dx - 1"] and ok["dF/dlam"]:
            verdict = "saddle_node"
        elif sign < 0 and ok["dF/dx + 1"] and ok["d2(F^2)/dlam dx"] and ok["d3(F^2)/dx3"]:
            verdict = "period_doubling"
    return BifurcationReport(lambda0, x0, conds, verdict)


# -- prediction against measurement ----------------------------------------------------


@dataclass
class Measurement:
    classification: Classification
    x1: float
    n_points: int = 0
    stop_reason: str = ""
    decay: Optional[fr.PowerLawFit] = None
    sausage: Optional[fr.DimensionEstimate] = None
    tricot: Optional[fr.DimensionEstimate] = None
    content: Optional[fr.ContentEstimate] = None
    nondegenerate: Optional[bool] = None
    error: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def predicted_dim(self):
        return self.classification.predicted_dim

    @property
    def predicted_beta(self):
        return self.classification.predicted_beta

    def to_dict(self):
        def d(x):
            return None if x is None else x.to_dict()

        return {
            "classification": self.classification.to_dict(),
            "x1": self.x1,
            "n_points": self.n_points,
            "stop_reason": self.stop_reason,
            "predicted": {"dim": _num(self.predicted_dim), "beta": _num(self.predicted_beta)},
            "measured": {
                "dim_sausage": None if self.sausage is None else self.sausage.d,
                "dim_tricot": None if self.tricot is None else self.tricot.d,
                "beta": None if self.decay is None else self.decay.beta,
            },
            "decay": d(self.decay),
            "sausage": d(self.sausage),
            "tricot": d(self.tricot),
            "content": d(self.content),
            "nondegenerate": self.nondegenerate,
            "error": self.error,
            "notes": list(self.notes),
        }


def _classes(xs, start, stride, limits):
    """Residue classes of the orbit with stride ``stride`` from ``start``,
    each paired with its nearest limit point."""
    out = []
    for r in range(stride):
        j = np.arange(start + r, len(xs), stride)
        if j.size < 3:
            continue
        last = xs[j[-1]]
        lim = min(limits, key=lambda a: abs(a - last))
        out.append((j, lim))
    return out


def predict_and_measure(map: MapSystem, target: Union[float, Cycle], x1: float, n: int,
                        max_order: int = DEFAULT_MAX_ORDER, tol: float = DEFAULT_TOL,
                        floor: float = 1e-300, burn: Optional[int] = None) -> Measurement:
    """Classify ``target``, iterate from ``x1`` and measure the orbit.

    The orbit is split into residue classes that approach the target
    monotonically (stride = cycle period, doubled for oscillating
    points).  Each class is completed by the segment between its last
    point and its limit, so the sausage measure matches that of the full
    infinite orbit at radii above the final gap; the rarefaction index is
    taken as the largest over the classes, each indexed by orbit time.
    ``burn`` leading points (default max(64, N/100)) are left out of the
    decay fit and the rarefaction index.
    """
    if isinstance(target, Cycle):
        cmap = replace(map, power=target.return_power)
        x0 = target.points[0]
        limits = list(target.points)
        period = target.period
    else:
        cmap, x0, limits, period = map, float(target), [float(target)], 1
    cls = classify_fixed_point(cmap, x0, max_order, tol)
    m = Measurement(cls, float(x1))
    if cls.predicted_dim is None:
        m.error = f"no dimension prediction for a {cls.kind} point"
        return m

    orbit = iterate(map, x1, n, floor)
    m.n_points = len(orbit)
    m.stop_reason = str(orbit.stop_reason)
    if orbit.stop_reason.kind == "diverged":
        m.error = f"orbit diverged: {orbit.stop_reason.note}"
        return m
    dist = distance_sequence(orbit, target).d
    if dist[-1] > dist[0]:
        m.error = "orbit does not approach the target (final distance exceeds initial)"
        return m

    xs = orbit.xs
    nidx = np.arange(1, len(xs) + 1, dtype=float)
    if burn is None:
        burn = burn_in(len(xs)) if len(xs) > 4 * 64 else 0
    start = min(burn, len(xs) - 1)
    stride = period * (2 if cls.oscillating else 1)
    tangent = cls.kind in (TANGENT_MONOTONE, TANGENT_OSCILLATING, SUPERPOLYNOMIAL)
    classes = _classes(xs, start, stride, limits) if tangent else []

    keep = dist[start:] > 0
    try:
        m.decay = fr.fit_decay_exponent(dist[start:][keep], max(start, 1),
                                        index=nidx[start:][keep])
    except BifdimError as exc:
        m.notes.append(f"decay fit: {exc}")

    segments = [(float(xs[j[-1]]), lim) for j, lim in classes]
    pts = fr.PointSet(xs, note="orbit", segments=segments)
    m.sausage = fr.dim_sausage(pts)

    best = None
    for j, lim in classes:
        try:
            est = fr.dim_tricot(np.abs(xs[j] - lim), index=nidx[j])
        except BifdimError as exc:
            m.notes.append(f"tricot on class {int(j[0]) % stride}: {exc}")
            continue
        if best is None or est.d > best.d:
            best = est
    m.tricot = best

    m.content = fr.content_estimate(pts, float(cls.predicted_dim))
    m.nondegenerate = bool(0.05 < m.content.lower and m.content.upper < 50)
    return m
