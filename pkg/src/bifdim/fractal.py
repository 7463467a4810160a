"""Epsilon-neighbourhoods of point sets on the line, box dimension and content.

The sausage measure is computed exactly.  After sorting, the union of
intervals (p_i - eps, p_i + eps) is the span of the set plus 2 eps, minus
every gap wider than 2 eps shortened by 2 eps.  Written the other way
round, which avoids cancellation when eps is small,

    |S_eps| = L + 2 eps + sum_i min(g_i, 2 eps)

where g_i are the positive gaps between consecutive items and L is the
length already covered by solid segments (zero for a plain point set).
Sorting the gaps once makes each evaluation a binary search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import PreconditionError

__all__ = [
    "PointSet",
    "DimensionEstimate",
    "ContentEstimate",
    "PowerLawFit",
    "sausage_measure",
    "default_window",
    "dim_sausage",
    "dim_tricot",
    "fit_decay_exponent",
    "envelope_constants",
    "content_estimate",
    "content_bounds",
    "conjectured_content",
]

DEFAULT_SAMPLES = 48
HEAD_GAP_RATIO = 0.03


@dataclass(frozen=True, eq=False)
class PointSet:
    """Sorted, deduplicated finite set of reals.

    ``segments`` optionally adds closed intervals (lo, hi) to the set.  They
    are used to complete an orbit by the stretch between its last computed
    point and its known limit, which a finite record cannot contain.
    """

    pts: np.ndarray = field(repr=False)
    note: str = ""
    segments: tuple = ()

    def __post_init__(self):
        p = np.sort(np.asarray(self.pts, dtype=float).ravel())
        if p.size and not np.all(np.isfinite(p)):
            raise PreconditionError("point set contains non-finite values")
        if p.size > 1:
            keep = np.ones(p.size, dtype=bool)
            keep[1:] = np.diff(p) > 1e-15 * (1.0 + np.abs(p[1:]))
            p = p[keep]
        p.setflags(write=False)
        object.__setattr__(self, "pts", p)
        segs = []
        for lo, hi in self.segments:
            lo, hi = float(lo), float(hi)
            if lo > hi:
                lo, hi = hi, lo
            segs.append((lo, hi))
        object.__setattr__(self, "segments", tuple(segs))

    @classmethod
    def from_sequence(cls, values, note="", segments=()):
        return cls(np.asarray(values, dtype=float), note, segments)

    def __len__(self):
        return int(self.pts.size)

    @property
    def empty(self):
        return self.pts.size == 0 and not self.segments

    @cached_property
    def _layout(self):
        """(sorted positive gaps, their prefix sums, solid length, diameter)."""
        if self.empty:
            raise PreconditionError("empty point set")
        if not self.segments:
            g = np.diff(self.pts)
            solid = 0.0
            lo, hi = self.pts[0], self.pts[-1]
        else:
            s = np.concatenate([self.pts, [a for a, _ in self.segments]])
            t = np.concatenate([self.pts, [b for _, b in self.segments]])
            order = np.argsort(s, kind="stable")
            s, t = s[order], t[order]
            T = np.maximum.accumulate(t)
            g = s[1:] - T[:-1]
            ext = T[1:] - np.maximum(T[:-1], s[1:])
            solid = float((T[0] - s[0]) + np.sum(np.maximum(ext, 0.0)))
            lo, hi = s[0], T[-1]
        g = np.sort(g[g > 0])
        csum = np.concatenate([[0.0], np.cumsum(g)])
        return g, csum, solid, float(hi - lo)

    @property
    def gaps(self):
        return self._layout[0]

    @property
    def diameter(self):
        return self._layout[3]


@dataclass(frozen=True)
class DimensionEstimate:
    d: float
    method: str
    window: tuple
    samples: int
    fit_r2: Optional[float] = None
    spread: Optional[float] = None
    note: str = ""

    def to_dict(self):
        return {
            "d": self.d,
            "method": self.method,
            "window": list(self.window),
            "samples": self.samples,
            "fit_r2": self.fit_r2,
            "spread": self.spread,
            "note": self.note,
        }


@dataclass(frozen=True)
class ContentEstimate:
    d: float
    lower: float
    upper: float
    window: tuple
    samples: int

    def to_dict(self):
        return {
            "d": self.d,
            "lower": self.lower,
            "upper": self.upper,
            "window": list(self.window),
            "samples": self.samples,
        }


@dataclass(frozen=True)
class PowerLawFit:
    beta: float
    c: float
    window: tuple
    fit_r2: float

    def to_dict(self):
        return {"beta": self.beta, "c": self.c, "window": list(self.window),
                "fit_r2": self.fit_r2}


# -- sausage ---------------------------------------------------------------------


def sausage_measure(s: PointSet, eps):
    """Lebesgue measure of the union of (p - eps, p + eps) over p in ``s``.

    ``eps`` may be a scalar or an array of radii.
    """
    if s.empty:
        raise PreconditionError("empty point set")
    e = np.asarray(eps, dtype=float)
    if np.any(~(e > 0)):
        raise PreconditionError("eps must be positive")
    g, csum, solid, _ = s._layout
    w = 2.0 * e
    k = np.searchsorted(g, w, side="right")  # gaps no wider than 2 eps
    out = solid + w + csum[k] + w * (g.size - k)
    return float(out) if np.ndim(out) == 0 else out


def default_window(s: PointSet):
    """Radius window inside the scaling regime of ``s``.

    Radii are tied to gap ranks: at eps = g_(k)/2 exactly k gaps are still
    open.  The window runs from k = M^0.4 (or the first rank whose gap is
    below 3% of the largest) down to k = M/100, or M/10 when the set
    carries a completion segment, which removes the saturation bias at
    small radii.  Sets too small for rank bands fall back to
    (diam/10, max(median of the smallest 1% of gaps, 1e-13 diam)).
    """
    g, _, _, diam = s._layout
    m = g.size
    if m == 0:
        scale = max(1.0, float(np.max(np.abs(s.pts)))) if s.pts.size else max(1.0, diam)
        if diam > 0:
            return diam / 1e3, diam / 10
        return 1e-3 * scale, 1e-1 * scale
    desc = g[::-1]
    hi_rank = math.ceil(m ** 0.4)
    # An orbit started mid-sequence has a run of nearly equal leading gaps;
    # push the upper radius below them.
    while hi_rank < m - 1 and desc[hi_rank] > HEAD_GAP_RATIO * desc[0]:
        hi_rank = math.ceil(1.25 * hi_rank)
    lo_rank = m // (10 if s.segments else 100)
    if lo_rank >= 4 * hi_rank and lo_rank < m:
        eps_max, eps_min = desc[hi_rank] / 2, desc[lo_rank] / 2
        if eps_min < eps_max:
            return float(eps_min), float(eps_max)
    small = g[: max(1, int(math.ceil(0.01 * m)))]
    eps_min = max(float(np.median(small)), 1e-13 * diam)
    eps_max = diam / 10
    if not eps_min < eps_max:
        eps_min = eps_max / 1e3
    return eps_min, eps_max


def _window(s, eps_max, eps_min, samples):
    if eps_max is None or eps_min is None:
        lo, hi = default_window(s)
        eps_min = lo if eps_min is None else eps_min
        eps_max = hi if eps_max is None else eps_max
    if not 0 < eps_min < eps_max:
        raise PreconditionError(f"need 0 < eps_min < eps_max, got {eps_min!r}, {eps_max!r}")
    if samples < 8:
        raise PreconditionError("samples must be >= 8")
    return float(eps_min), float(eps_max), np.geomspace(eps_min, eps_max, samples)


def _linfit(x, y):
    """Least squares y = a + b x; returns (a, b, r2)."""
    A = np.vstack([np.ones_like(x), x]).T
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (a + b * x)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 0.0
    return float(a), float(b), min(max(r2, 0.0), 1.0)


def dim_sausage(s: PointSet, eps_max=None, eps_min=None, samples=DEFAULT_SAMPLES):
    """Box dimension from the slope of log |S_eps| against log eps.

    Since |S_eps| behaves like eps^(1-d), d = 1 - slope, clamped to [0, 1].
    """
    lo, hi, eps = _window(s, eps_max, eps_min, samples)
    m = sausage_measure(s, eps)
    ly = np.log(m)
    if np.ptp(ly) == 0:
        return DimensionEstimate(0.0, "sausage", (lo, hi), samples, 0.0,
                                 note="degenerate fit: constant measure")
    _, slope, r2 = _linfit(np.log(eps), ly)
    d = min(max(1.0 - slope, 0.0), 1.0)
    return DimensionEstimate(d, "sausage", (lo, hi), samples, r2)


# -- sequences -------------------------------------------------------------------


def _positions(a, index):
    a = np.asarray(a, dtype=float).ravel()
    if index is None:
        n = np.arange(1, a.size + 1, dtype=float)
    else:
        n = np.asarray(index, dtype=float).ravel()
        if n.shape != a.shape:
            raise PreconditionError("index and sequence lengths differ")
        if n.size and (n[0] < 1 or np.any(np.diff(n) <= 0)):
            raise PreconditionError("index must be increasing and start at >= 1")
    return a, n


def dim_tricot(a, index=None):
    """Rarefaction-index estimate of the box dimension of {a_n}.

    Evaluates q_n = 1 / (1 + log(1/a_n) / log n) for n in [N/10, N] and
    returns the median; ``spread`` is half the range of q_n over the window.
    ``index`` gives the n of each entry when ``a`` is a subsequence of a
    longer sequence (for instance every second point of an orbit).
    """
    a, n = _positions(a, index)
    if a.size < 3:
        raise PreconditionError("need at least 3 terms")
    if np.any(~(a > 0)):
        raise PreconditionError("sequence must be positive")
    g = a[:-1] - a[1:]
    if np.any(g <= 0):
        raise PreconditionError("sequence must be strictly decreasing")
    bad = int(np.count_nonzero(g[1:] > g[:-1]))
    if bad > 0.01 * g.size:
        raise PreconditionError(
            f"gaps are not monotone nonincreasing ({bad} of {g.size} violations)")
    sel = (n >= n[-1] / 10) & (n > 1)
    if not np.any(sel):
        raise PreconditionError("empty tail window")
    q = 1.0 / (1.0 + np.log(1.0 / a[sel]) / np.log(n[sel]))
    d = min(max(float(np.median(q)), 0.0), 1.0)
    spread = float(np.ptp(q)) / 2
    return DimensionEstimate(d, "tricot", (float(n[sel][0]), float(n[sel][-1])),
                             int(np.count_nonzero(sel)), None, spread)


def _fit_window(a, n0, index):
    a, n = _positions(a, index)
    if n0 < 1:
        raise PreconditionError("n0 must be >= 1")
    if a.size <= 2 * n0:
        raise PreconditionError(f"need more than {2 * n0} terms, got {a.size}")
    if np.any(~(a > 0)):
        raise PreconditionError("sequence must be positive")
    sel = n >= n0
    return a[sel], n[sel]


def fit_decay_exponent(a, n0=1, index=None):
    """Least-squares fit of a_n ~ c n^(-beta) on n >= n0 in log-log scale."""
    a, n = _fit_window(a, n0, index)
    ic, slope, r2 = _linfit(np.log(n), np.log(a))
    c = math.exp(ic) if ic < 709.0 else math.inf
    return PowerLawFit(-slope, c, (int(n[0]), int(n[-1])), r2)


def envelope_constants(a, beta, n0=1, index=None):
    """(min, max) of a_n n^beta over n >= n0."""
    a, n = _fit_window(a, n0, index)
    w = a * n ** float(beta)
    return float(w.min()), float(w.max())


# -- content ---------------------------------------------------------------------


def content_estimate(s: PointSet, d, eps_max=None, eps_min=None, samples=DEFAULT_SAMPLES):
    """Extrema of |S_eps| / eps^(1-d) over a geometric radius grid."""
    if not 0 <= d <= 1:
        raise PreconditionError("d must lie in [0, 1]")
    lo, hi, eps = _window(s, eps_max, eps_min, samples)
    r = sausage_measure(s, eps) / eps ** (1.0 - d)
    return ContentEstimate(float(d), float(r.min()), float(r.max()), (lo, hi), samples)


def content_bounds(A, B, a_lo, b_hi, alpha):
    """Lower and upper bounds on the d-dimensional content, d = 1 - 1/alpha,
    for orbits of x -> x - f(x) with A x^alpha <= f(x) <= B x^alpha and
    envelope a_lo n^-beta <= x_n <= b_hi n^-beta."""
    if not 0 < A <= B:
        raise PreconditionError("need 0 < A <= B")
    if not 0 < a_lo <= b_hi:
        raise PreconditionError("need 0 < a_lo <= b_hi")
    if not alpha > 1:
        raise PreconditionError("need alpha > 1")
    d = 1.0 - 1.0 / alpha
    lower = (a_lo / b_hi) * (2.0 / B) ** (1.0 / alpha) + 2.0 * (A * a_lo ** alpha / 2.0) ** d
    upper = (b_hi / a_lo) * (2.0 / A) ** (1.0 / alpha) + 2.0 * (B * b_hi ** alpha / 2.0) ** d
    return lower, upper


def conjectured_content(A, alpha):
    """Conjectured content (2/A)^(1/alpha) alpha/(alpha-1) for f(x) = A x^alpha.

    An empirical value, not a proven one.
    """
    if not A > 0:
        raise PreconditionError("need A > 0")
    if not alpha > 1:
        raise PreconditionError("need alpha > 1")
    return (2.0 / A) ** (1.0 / alpha) * alpha / (alpha - 1.0)
