"""Truncated Taylor series ("jets") for exact higher derivatives.

A jet of order K at a point stores the Taylor coefficients
``coeffs[k] = f^(k)(x0) / k!`` for k = 0..K.  Arithmetic on jets is the
arithmetic of power series truncated after degree K, so composing jets
gives derivatives of composite functions without truncation error.

Coefficients may themselves be jets (in another variable), which gives
mixed partial derivatives: an outer jet in ``x`` whose coefficients are
order-1 jets in ``lam`` carries d^k/dx^k and d/dlam d^k/dx^k together.
Coefficients may also be numpy arrays, in which case one jet evaluates a
whole grid of expansion points at once; array evaluation propagates NaN
instead of raising, scalar evaluation raises :class:`DomainError`.
"""

import math
from math import factorial

import numpy as np

from .errors import DomainError

__all__ = [
    "Jet",
    "exp",
    "log",
    "sin",
    "cos",
    "sqrt",
    "fabs",
    "power",
    "constant_part",
]


def constant_part(c):
    """Innermost constant term of a (possibly nested) jet, or ``c`` itself."""
    while isinstance(c, Jet):
        c = c.coeffs[0]
    return c


def _plain(a):
    # Python or numpy scalar: use the math module so jets of order 0 agree
    # bit for bit with the compiled scalar evaluator.
    return isinstance(a, (float, int))


def _depth(c):
    return c.depth if isinstance(c, Jet) else 0


def _has_derivatives(c):
    if not isinstance(c, Jet):
        return False
    return c.order > 0 or _has_derivatives(c.coeffs[0])


def _check(ok, c, message):
    # Arrays are evaluated NaN-propagating; only scalars are policed.
    v = constant_part(c)
    if np.ndim(v) == 0 and not ok(float(v)):
        raise DomainError(message)


class Jet:
    """Truncated power series with coefficients ``coeffs[0..order]``."""

    __slots__ = ("coeffs",)
    # ndarray (op) Jet must defer to the reflected Jet method.
    __array_ufunc__ = None

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        self.coeffs = coeffs

    @classmethod
    def variable(cls, x0, order):
        """The identity function expanded at ``x0``."""
        if order < 0:
            raise ValueError("order must be >= 0")
        zero = 0.0 * x0
        if order == 0:
            return cls((x0,))
        return cls((x0, zero + 1.0) + (zero,) * (order - 1))

    @classmethod
    def constant(cls, c, order):
        zero = 0.0 * c
        return cls((c,) + (zero,) * order)

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def depth(self):
        return 1 + _depth(self.coeffs[0])

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, k):
        """k-th derivative at the expansion point (``coeffs[k] * k!``)."""
        return self.coeffs[k] * factorial(k)

    def derivatives(self):
        return [self.derivative(k) for k in range(len(self.coeffs))]

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"

    def __len__(self):
        return len(self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    # A deeper jet on the right is handed the whole operation: Python does
    # not try the reflected method when both operands have the same type.

    def _lower(self, other):
        """True if ``other`` acts as a scalar for this jet."""
        return _depth(other) < self.depth

    def _same(self, other):
        n = min(len(self.coeffs), len(other.coeffs))
        return self.coeffs[:n], other.coeffs[:n]

    def __neg__(self):
        return Jet(-c for c in self.coeffs)

    def __pos__(self):
        return self

    def __add__(self, other):
        if self._lower(other):
            return Jet((self.coeffs[0] + other,) + self.coeffs[1:])
        if _depth(other) > self.depth:
            return other.__radd__(self)
        a, b = self._same(other)
        return Jet(x + y for x, y in zip(a, b))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if self._lower(other):
            return Jet((self.coeffs[0] - other,) + self.coeffs[1:])
        if _depth(other) > self.depth:
            return other.__rsub__(self)
        a, b = self._same(other)
        return Jet(x - y for x, y in zip(a, b))

    def __rsub__(self, other):
        return Jet((other - self.coeffs[0],) + tuple(-c for c in self.coeffs[1:]))

    def __mul__(self, other):
        if self._lower(other):
            return Jet(c * other for c in self.coeffs)
        if _depth(other) > self.depth:
            return other.__rmul__(self)
        a, b = self._same(other)
        out = []
        for k in range(len(a)):
            s = a[0] * b[k]
            for j in range(1, k + 1):
                s = s + a[j] * b[k - j]
            out.append(s)
        return Jet(out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if self._lower(other):
            _check(lambda v: v != 0.0, other, "division by zero")
            return Jet(c / other for c in self.coeffs)
        if _depth(other) > self.depth:
            return other.__rtruediv__(self)
        return self * other._reciprocal()

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def _reciprocal(self):
        a = self.coeffs
        _check(lambda v: v != 0.0, a[0], "division by zero")
        b = [1.0 / a[0]]
        for k in range(1, len(a)):
            s = a[1] * b[k - 1]
            for j in range(2, k + 1):
                s = s + a[j] * b[k - j]
            b.append(-s / a[0])
        return Jet(b)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __rpow__(self, base):
        return power(base, self)


# -- elementary functions ------------------------------------------------------
# Each accepts a float, an ndarray, or a Jet.  On jets the constant term is
# pushed through the same function recursively, so nesting works.


def exp(a):
    if not isinstance(a, Jet):
        return math.exp(a) if _plain(a) else np.exp(a)
    c = a.coeffs
    b = [exp(c[0])]
    for k in range(1, len(c)):
        s = c[1] * b[k - 1]
        for j in range(2, k + 1):
            s = s + j * c[j] * b[k - j]
        b.append(s / k)
    return Jet(b)


def log(a):
    _check(lambda v: v > 0.0, a, "log of nonpositive argument")
    if not isinstance(a, Jet):
        return math.log(a) if _plain(a) else np.log(a)
    c = a.coeffs
    b = [log(c[0])]
    for k in range(1, len(c)):
        s = c[k]
        for j in range(1, k):
            s = s - (j / k) * b[j] * c[k - j]
        b.append(s / c[0])
    return Jet(b)


def _sincos(a):
    c = a.coeffs
    s_, c_ = [sin(c[0])], [cos(c[0])]
    for k in range(1, len(c)):
        ss = c[1] * c_[k - 1]
        cc = c[1] * s_[k - 1]
        for j in range(2, k + 1):
            ss = ss + j * c[j] * c_[k - j]
            cc = cc + j * c[j] * s_[k - j]
        s_.append(ss / k)
        c_.append(-cc / k)
    return Jet(s_), Jet(c_)


def sin(a):
    if not isinstance(a, Jet):
        return math.sin(a) if _plain(a) else np.sin(a)
    return _sincos(a)[0]


def cos(a):
    if not isinstance(a, Jet):
        return math.cos(a) if _plain(a) else np.cos(a)
    return _sincos(a)[1]


def fabs(a):
    """Absolute value; not differentiable where the argument vanishes."""
    if not isinstance(a, Jet):
        return np.abs(a)
    v = constant_part(a)
    if np.ndim(v) == 0:
        if v == 0.0:
            if _has_derivatives(a):
                raise DomainError("abs is not differentiable at 0")
            return a
        return a if v > 0.0 else -a
    return a * np.sign(v)


def _real_power(a, r):
    """a ** r for a Jet ``a`` and a real constant exponent ``r``."""
    c = a.coeffs
    b = [power(c[0], r)]
    for k in range(1, len(c)):
        s = (r - k + 1.0) * c[1] * b[k - 1]
        for j in range(2, k + 1):
            s = s + ((r + 1.0) * j - k) * c[j] * b[k - j]
        b.append(s / (k * c[0]))
    return Jet(b)


def _int_power(a, n):
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _is_integer(r):
    return float(r).is_integer()


def power(base, exponent):
    """``base ** exponent`` on the principal real branch.

    Integer exponents use repeated multiplication, so they work at a zero
    base and for negative bases.  Non-integer exponents need a positive
    base; a zero base is accepted only when no derivatives are requested.
    """
    if isinstance(exponent, Jet):
        _check(lambda v: v > 0.0, base, "non-integer power of nonpositive base")
        return exp(exponent * log(base))
    r = exponent
    if np.ndim(r) != 0:
        raise DomainError("array exponents are not supported")
    r = float(r)
    if not isinstance(base, Jet):
        if not _is_integer(r):
            _check(lambda v: v >= 0.0, base, "non-integer power of negative base")
        if r < 0:
            _check(lambda v: v != 0.0, base, "zero to a negative power")
        if _plain(base):
            try:
                return math.pow(base, r)
            except OverflowError:
                return math.inf if base > 0 or _is_integer(r / 2) else -math.inf
        with np.errstate(all="ignore"):
            return np.power(base, r)
    if _is_integer(r):
        n = int(r)
        if n == 0:
            return Jet.constant(0.0 * base.coeffs[0] + 1.0, base.order)
        if n > 0:
            return _int_power(base, n)
        return 1.0 / _int_power(base, -n)
    v = constant_part(base)
    if np.ndim(v) == 0:
        if v < 0.0:
            raise DomainError("non-integer power of negative base")
        if v == 0.0:
            if _has_derivatives(base) or r < 0:
                raise DomainError("non-integer power is not differentiable at 0")
            return base
    return _real_power(base, r)


def sqrt(a):
    _check(lambda v: v >= 0.0, a, "sqrt of negative argument")
    if not isinstance(a, Jet):
        return math.sqrt(a) if _plain(a) else np.sqrt(a)
    return power(a, 0.5)
