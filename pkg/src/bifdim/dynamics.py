"""One-parameter maps, orbits, fixed points and cycles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from . import jet as J
from .errors import DomainError
from .exprmap import BinOp, MapExpr, Name, Neg, parse

log = logging.getLogger(__name__)

__all__ = [
    "BUILTINS",
    "MapSystem",
    "StopReason",
    "Orbit",
    "FixedPoint",
    "Cycle",
    "Distances",
    "iterate",
    "find_fixed_points",
    "find_cycles",
    "distance_sequence",
    "burn_in",
    "default_seed",
]

BUILTINS = {
    "logistic": "lam*x*(1-x)",
    "exponential": "lam*exp(x)",
}

DIVERGENCE_CUTOFF = 1e12
DEFAULT_FLOOR = 1e-300
DEFAULT_GRID = 4096


@dataclass(frozen=True)
class MapSystem:
    """F(lam, .) at a fixed parameter, iterated ``power`` times per step."""

    family: str
    lam: float
    power: int = 1
    expr: Optional[MapExpr] = None

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 1:
            raise ValueError(f"power must be an integer >= 1, got {self.power!r}")
        if self.expr is None:
            if self.family not in BUILTINS:
                raise ValueError(f"unknown map family {self.family!r}")
            object.__setattr__(self, "expr", parse(BUILTINS[self.family]))
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def logistic(cls, lam, power=1):
        return cls("logistic", lam, power)

    @classmethod
    def exponential(cls, lam, power=1):
        return cls("exponential", lam, power)

    @classmethod
    def custom(cls, expr, lam=0.0, power=1):
        if isinstance(expr, str):
            expr = parse(expr)
        return cls("custom", lam, power, expr)

    @classmethod
    def recursion(cls, f, oscillating=False, lam=0.0, power=1):
        """Normal form x -> x - f(x), or x -> -x - f(x) when ``oscillating``."""
        if isinstance(f, str):
            f = parse(f)
        head = Neg(Name("x")) if oscillating else Name("x")
        tree = BinOp("-", head, f.ast)
        expr = MapExpr(tree)
        return cls("custom", lam, power, MapExpr(tree, expr.render()))

    def with_power(self, power):
        return replace(self, power=power)

    def describe(self):
        return {
            "family": self.family,
            "expr": self.expr.render(),
            "lambda": self.lam,
            "power": self.power,
        }

    # -- evaluation ---------------------------------------------------------

    @cached_property
    def _scalar(self):
        return self.expr.scalar_function()

    @cached_property
    def _vector(self):
        return self.expr.vector_function()

    def step_function(self):
        """Plain-float closure for one step (F applied ``power`` times)."""
        g, lam, q = self._scalar, self.lam, self.power
        if q == 1:
            return lambda x: g(x, lam)

        def f(x):
            for _ in range(q):
                x = g(x, lam)
            return x

        return f

    def step(self, x):
        try:
            return self.step_function()(float(x))
        except (ValueError, ArithmeticError) as exc:
            raise DomainError(str(exc) or type(exc).__name__) from exc

    def values(self, xs):
        """Vectorized step over an array; NaN where undefined."""
        y = np.asarray(xs, dtype=float)
        for _ in range(self.power):
            y = self._vector(y, self.lam)
        return y

    def compose(self, x, lam=None):
        """Step applied to arbitrary number-like ``x`` (jets, arrays)."""
        lam = self.lam if lam is None else lam
        for _ in range(self.power):
            x = self.expr.interpret(x, lam)
        return x

    def jet(self, x0, order):
        """Jet of the step map x -> F^power(lam, x) at ``x0``."""
        x = J.Jet.variable(float(x0), order)
        try:
            y = self.compose(x)
        except DomainError:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise DomainError(str(exc)) from exc
        if not isinstance(y, J.Jet):
            y = J.Jet.constant(y, order)
        coeffs = [float(c) for c in y.coeffs]
        if not all(math.isfinite(c) for c in coeffs):
            raise DomainError("non-finite jet coefficient")
        return J.Jet(coeffs)

    def multiplier(self, x0):
        return self.jet(x0, 1).coeffs[1]


# -- orbits -----------------------------------------------------------------------


@dataclass(frozen=True)
class StopReason:
    kind: str  # max_iter | converged | diverged | cycle_detected
    limit: Optional[float] = None
    period: Optional[int] = None
    note: str = ""

    def __str__(self):
        if self.kind == "converged":
            return f"converged({self.limit!r})"
        if self.kind == "cycle_detected":
            return f"cycle_detected({self.period})"
        if self.note:
            return f"{self.kind} ({self.note})"
        return self.kind


@dataclass(frozen=True)
class Orbit:
    xs: np.ndarray = field(repr=False)
    map: MapSystem
    x1: float
    stop_reason: StopReason

    def __len__(self):
        return len(self.xs)

    @property
    def final(self):
        return float(self.xs[-1])


def burn_in(n):
    """Default number of leading points dropped before asymptotic fits."""
    return max(64, n // 100)


def default_seed(x0, width, side=1):
    return x0 + side * 0.05 * width


def iterate(map: MapSystem, x1: float, max_iter: int, floor: float = DEFAULT_FLOOR) -> Orbit:
    """Record x_1 .. x_N with x_{n+1} = F^q(lam, x_n), N <= ``max_iter``.

    Stops early when the next value would differ from the current one by
    less than ``floor`` (converged), when it is non-finite or exceeds the
    divergence cutoff, when evaluation leaves the domain (diverged, with a
    note), or when it repeats an earlier value exactly (cycle_detected).
    The repeating value is not recorded.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if floor < 0:
        raise ValueError("floor must be >= 0")
    x = float(x1)
    if not math.isfinite(x):
        raise ValueError("x1 must be finite")
    f = map.step_function()
    xs = [x]
    reason = StopReason("max_iter")
    # Brent's cycle finding: constant memory, exact minimal period.
    tortoise, t_index, span = x, 0, 1
    cutoff = DIVERGENCE_CUTOFF
    for i in range(1, max_iter):
        try:
            y = f(x)
        except (ValueError, ArithmeticError) as exc:
            reason = StopReason("diverged", note=f"domain error: {exc}")
            break
        if not abs(y) <= cutoff:
            reason = StopReason("diverged", note="non-finite or beyond cutoff")
            break
        if abs(y - x) < floor or y == x:
            reason = StopReason("converged", limit=x)
            break
        if y == tortoise:
            period = i - t_index
            xs = _trim_cycle(xs, period)
            reason = StopReason("cycle_detected", period=period)
            break
        xs.append(y)
        x = y
        if i - t_index == span:
            tortoise, t_index, span = y, i, span * 2
    return Orbit(np.array(xs), map, float(x1), reason)


def _trim_cycle(xs, period):
    """Cut the record just before the first exact repeat."""
    a = np.array(xs)
    hits = np.nonzero(a[period:] == a[:-period])[0] if len(a) > period else []
    if len(hits) == 0:
        return xs
    return xs[: int(hits[0]) + period]


# -- fixed points and cycles ------------------------------------------------------


class FixedPoint(NamedTuple):
    x: float
    multiplier: float


def _bisect(g, a, b, ga, rel=1e-14):
    while b - a > rel * (1.0 + abs(a)):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        gm = g(m)
        if gm == 0.0:
            return m
        if not math.isfinite(gm):
            return None
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def _safe(fn):
    def g(x):
        try:
            return fn(x)
        except (ValueError, ArithmeticError):
            return math.nan

    return g


def _brackets(values):
    """Indices i with an exact zero at i or a sign change on [i, i+1]."""
    v = values
    ok = np.isfinite(v)
    zeros = np.nonzero(ok & (v == 0.0))[0]
    s = np.sign(v)
    change = np.nonzero(ok[:-1] & ok[1:] & (s[:-1] * s[1:] < 0))[0]
    return zeros, change


def find_fixed_points(map: MapSystem, lo: float, hi: float, grid: int = DEFAULT_GRID):
    """Solutions of F^q(lam, x) = x on [lo, hi] with their multipliers.

    Sign changes of G(x) = F^q(x) - x on a uniform grid are refined by
    bisection.  Tangential roots, where G touches zero without changing
    sign, are picked up from sign changes of G' whose critical point has
    |G| below 1e-12 (1 + |x|).
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if grid < 2:
        raise ValueError("grid must be >= 2")
    xs = np.linspace(lo, hi, grid)
    step = map.step_function()
    G = _safe(lambda x: step(x) - x)

    with np.errstate(all="ignore"):
        gv = map.values(xs) - xs
    candidates = []
    zeros, change = _brackets(gv)
    candidates += [float(xs[i]) for i in zeros]
    for i in change:
        r = _bisect(G, float(xs[i]), float(xs[i + 1]), float(gv[i]))
        if r is not None:
            candidates.append(r)

    # Tangential roots via the derivative.
    tangent = []
    with np.errstate(all="ignore"):
        try:
            dj = map.compose(J.Jet.variable(xs, 1))
            dv = np.asarray(dj.coeffs[1], dtype=float) - 1.0 if isinstance(dj, J.Jet) else None
        except (ValueError, ArithmeticError):
            dv = None
    if dv is not None:

        def dG(x):
            return map.jet(x, 1).coeffs[1] - 1.0

        dG = _safe(dG)
        zeros, change = _brackets(dv)
        crit = [float(xs[i]) for i in zeros]
        for i in change:
            r = _bisect(dG, float(xs[i]), float(xs[i + 1]), float(dv[i]))
            if r is not None:
                crit.append(r)
        for c in crit:
            gc = G(c)
            if math.isfinite(gc) and abs(gc) <= 1e-12 * (1.0 + abs(c)):
                tangent.append(c)
    # Rounding splits a double root into a pair of simple ones about
    # sqrt(eps) apart; the tangential root stands for both.
    for c in tangent:
        near = 1e-6 * (1.0 + abs(c))
        candidates = [r for r in candidates if abs(r - c) > near]
    candidates += tangent

    roots = []
    for r in sorted(candidates):
        if roots and abs(r - roots[-1]) < 1e-10:
            if abs(G(r)) < abs(G(roots[-1])):
                roots[-1] = r
            continue
        roots.append(r)
    out = []
    for r in roots:
        try:
            out.append(FixedPoint(r, map.multiplier(r)))
        except DomainError:
            log.debug("dropping root %r: multiplier undefined", r)
    return out


@dataclass(frozen=True)
class Cycle:
    """Periodic orbit of the step map of the system it was found for.

    ``points`` are sorted; ``orbit_order`` lists them as F visits them,
    starting from the smallest.  ``map_power`` is the power of that system,
    so the return map at each point is F^(period * map_power).
    """

    points: tuple
    period: int
    multiplier: float
    map_power: int = 1
    orbit_order: tuple = ()

    @property
    def return_power(self):
        return self.period * self.map_power


def _divisors(q):
    return [d for d in range(1, q) if q % d == 0]


def find_cycles(map: MapSystem, q: int, lo: float, hi: float, grid: int = DEFAULT_GRID,
                diagnostics=None):
    """Cycles of minimal period ``q`` of the system's step map in [lo, hi]."""
    if q < 1:
        raise ValueError("q must be >= 1")
    notes = diagnostics if diagnostics is not None else []
    mq = map.with_power(map.power * q)
    roots = [fp.x for fp in find_fixed_points(mq, lo, hi, grid)]

    lower = []
    for d in _divisors(q):
        md = map.with_power(map.power * d)
        lower += [fp.x for fp in find_fixed_points(md, lo, hi, grid)]
        G = _safe(lambda x, md=md: md.step(x) - x)
        roots = [r for r in roots if not abs(G(r)) <= 1e-9 * (1.0 + abs(r))]
    roots = [r for r in roots if all(abs(r - s) > 1e-9 for s in lower)]

    F = _safe(map.step)
    cycles = []
    remaining = sorted(roots)
    while remaining:
        start = remaining.pop(0)
        order = [start]
        y = start
        ok = True
        for _ in range(q - 1):
            y = F(y)
            match = [r for r in remaining if abs(r - y) <= 1e-8]
            if not match:
                ok = False
                break
            nxt = min(match, key=lambda r: abs(r - y))
            remaining.remove(nxt)
            order.append(nxt)
        if ok and not abs(F(order[-1]) - start) <= 1e-8:
            ok = False
        if not ok:
            msg = f"could not group root {start!r} into a {q}-cycle"
            notes.append(msg)
            log.warning(msg)
            continue
        try:
            mult = mq.multiplier(start)
        except DomainError:
            notes.append(f"multiplier undefined at {start!r}")
            continue
        cycles.append(Cycle(tuple(sorted(order)), q, mult, map.power, tuple(order)))
    return cycles


# -- derived sequences ------------------------------------------------------------


@dataclass(frozen=True)
class Distances:
    d: np.ndarray
    odd: Optional[np.ndarray] = None
    even: Optional[np.ndarray] = None


def distance_sequence(orbit, target) -> Distances:
    """Distance of each orbit point to a point or to the nearest cycle point.

    For a single target point also returns the signed offsets x_n - x0 at
    odd indices (x_1, x_3, ...) and at even indices (x_2, x_4, ...).
    """
    xs = orbit.xs if isinstance(orbit, Orbit) else np.asarray(orbit, dtype=float)
    if len(xs) == 0:
        raise ValueError("empty orbit")
    if isinstance(target, Cycle):
        d = np.abs(xs - target.points[0])
        for a in target.points[1:]:
            np.minimum(d, np.abs(xs - a), out=d)
        return Distances(d)
    x0 = float(target)
    u = xs - x0
    return Distances(np.abs(u), u[0::2], u[1::2])
