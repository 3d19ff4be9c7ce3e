"""Certified scalars: exact rationals where possible, outward-rounded floats otherwise."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[Fraction, int, float]

INF = math.inf

# Relative slack applied to libm results (log2, pow). CPython's libm calls are
# accurate to about one ulp; a few ulps of headroom keeps bounds honest.
LIBM_SLACK_ULPS = 4


def down(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, -INF)
    return x


def up(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, INF)
    return x


def as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    return Fraction(x)  # floats convert exactly


def float_down(x: Number) -> float:
    """Largest float that is <= x."""
    if isinstance(x, float):
        return x
    q = as_fraction(x)
    f = float(q)
    if math.isinf(f):
        return f if f < 0 else math.nextafter(INF, 0.0)
    if Fraction(f) > q:
        f = math.nextafter(f, -INF)
    return f


def float_up(x: Number) -> float:
    """Smallest float that is >= x."""
    if isinstance(x, float):
        return x
    q = as_fraction(x)
    f = float(q)
    if math.isinf(f):
        return f if f > 0 else math.nextafter(-INF, 0.0)
    if Fraction(f) < q:
        f = math.nextafter(f, INF)
    return f


def log2_exact(q: Fraction) -> Fraction | None:
    """log2(q) when q is an integer power of two, else None."""
    q = as_fraction(q)
    if q <= 0:
        return None
    n, d = q.numerator, q.denominator
    if n & (n - 1) == 0 and d & (d - 1) == 0:
        return Fraction(n.bit_length() - d.bit_length())
    return None


def log2_bounds(q: Number) -> tuple[float, float]:
    """Float enclosure of log2(q) for q > 0 (handles huge numerators and denominators)."""
    exact = log2_exact(as_fraction(q)) if not isinstance(q, float) else None
    if exact is not None:
        v = float(exact)
        return v, v
    if isinstance(q, float):
        v = math.log2(q)
        return down(v, LIBM_SLACK_ULPS), up(v, LIBM_SLACK_ULPS)
    q = as_fraction(q)
    a = math.log2(q.numerator)
    b = math.log2(q.denominator) if q.denominator != 1 else 0.0
    lo = down(down(a, LIBM_SLACK_ULPS) - up(b, LIBM_SLACK_ULPS))
    hi = up(up(a, LIBM_SLACK_ULPS) - down(b, LIBM_SLACK_ULPS))
    return lo, hi


def _is_exact(x: Number) -> bool:
    return not isinstance(x, float)


@dataclass(frozen=True)
class CertifiedValue:
    """An interval [lower, upper] guaranteed to contain a true value.

    Endpoints are Fractions when known exactly, floats otherwise; upper may be +inf.
    """

    lower: Number
    upper: Number

    def __post_init__(self):
        lo, hi = self.lower, self.upper
        if isinstance(lo, int):
            object.__setattr__(self, "lower", Fraction(lo))
        if isinstance(hi, int):
            object.__setattr__(self, "upper", Fraction(hi))
        if _gt(self.lower, self.upper):
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    @classmethod
    def exact(cls, x: Number) -> "CertifiedValue":
        return cls(x, x)

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.lower) and self.lower == self.upper

    @property
    def bounded(self) -> bool:
        return not (isinstance(self.upper, float) and math.isinf(self.upper))

    @property
    def width(self) -> float:
        if not self.bounded:
            return INF
        return float_up(as_fraction(self.upper) - as_fraction(self.lower))

    def mid(self) -> float:
        return (float(self.lower) + float(self.upper)) / 2

    def contains(self, x: Number) -> bool:
        return not _gt(self.lower, x) and not _gt(x, self.upper)

    def __add__(self, other):
        o = _coerce(other)
        return CertifiedValue(_add(self.lower, o.lower, -1), _add(self.upper, o.upper, 1))

    __radd__ = __add__

    def __neg__(self):
        return CertifiedValue(_neg(self.upper), _neg(self.lower))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        cands_lo = [_mul(a, b, -1) for a in (self.lower, self.upper) for b in (o.lower, o.upper)]
        cands_hi = [_mul(a, b, 1) for a in (self.lower, self.upper) for b in (o.lower, o.upper)]
        return CertifiedValue(_min(cands_lo), _max(cands_hi))

    __rmul__ = __mul__

    def reciprocal(self) -> "CertifiedValue":
        if not _gt(self.lower, 0):
            raise ZeroDivisionError("interval reciprocal requires a positive interval")
        return CertifiedValue(_div(1, self.upper, -1), _div(1, self.lower, 1))

    def __truediv__(self, other):
        o = _coerce(other)
        if _gt(o.lower, 0) and not _gt(0, self.lower):
            # both nonnegative: monotone shortcut keeps exact endpoints
            return CertifiedValue(_div(self.lower, o.upper, -1), _div(self.upper, o.lower, 1))
        return self * o.reciprocal()

    def floor_candidates(self) -> list[int]:
        lo = math.floor(as_fraction(self.lower)) if _is_exact(self.lower) else math.floor(self.lower)
        hi = math.floor(as_fraction(self.upper)) if _is_exact(self.upper) else math.floor(self.upper)
        return list(range(lo, hi + 1))

    def __repr__(self):
        if self.is_exact:
            return f"CertifiedValue({self.lower})"
        return f"CertifiedValue[{self.lower}, {self.upper}]"


def _coerce(x) -> CertifiedValue:
    if isinstance(x, CertifiedValue):
        return x
    return CertifiedValue(x, x)


def _gt(a: Number, b: Number) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        if isinstance(a, float) and math.isinf(a):
            return a > 0 and not (isinstance(b, float) and b == INF)
        if isinstance(b, float) and math.isinf(b):
            return b < 0 and not (isinstance(a, float) and a == -INF)
        return as_fraction(a) > as_fraction(b)
    return a > b


def _min(xs):
    best = xs[0]
    for x in xs[1:]:
        if _gt(best, x):
            best = x
    return best


def _max(xs):
    best = xs[0]
    for x in xs[1:]:
        if _gt(x, best):
            best = x
    return best


def _neg(a):
    return -a


def _round(v: float, direction: int) -> float:
    # three ulps cover the operand conversions plus the operation itself
    return down(v, 3) if direction < 0 else up(v, 3)


def _add(a, b, direction):
    if _is_exact(a) and _is_exact(b):
        return a + b
    return _round(float(a) + float(b), direction) if not _any_inf(a, b) else float(a) + float(b)


def _mul(a, b, direction):
    if _is_exact(a) and _is_exact(b):
        return a * b
    if (_is_exact(a) and a == 0) or (_is_exact(b) and b == 0):
        return Fraction(0)
    if _any_inf(a, b):
        return float(a) * float(b)
    return _round(float(a) * float(b), direction)


def _div(a, b, direction):
    if _is_exact(a) and _is_exact(b):
        return Fraction(a) / b
    if _is_exact(a) and a == 0:
        return Fraction(0)
    if isinstance(b, float) and math.isinf(b):
        return 0.0
    if isinstance(a, float) and math.isinf(a):
        return a
    return _round(float(a) / float(b), direction)


def _any_inf(*xs):
    return any(isinstance(x, float) and math.isinf(x) for x in xs)


def sum_down(values) -> Number:
    """Certified lower bound of a sum whose terms are themselves lower bounds."""
    exact = Fraction(0)
    floats = []
    for v in values:
        if _is_exact(v):
            exact += v
        else:
            floats.append(v)
    if not floats:
        return exact
    s = math.fsum(floats)
    if math.isinf(s):
        return s
    # fsum is correctly rounded; one step down covers it, then merge the exact part.
    return down(down(s) + float_down(exact))


def sum_up(values) -> Number:
    exact = Fraction(0)
    floats = []
    for v in values:
        if _is_exact(v):
            exact += v
        else:
            floats.append(v)
    if not floats:
        return exact
    s = math.fsum(floats)
    if math.isinf(s):
        return s
    return up(up(s) + float_up(exact))


def mul_down(a: Number, b: Number) -> Number:
    return _mul(a, b, -1)


def mul_up(a: Number, b: Number) -> Number:
    return _mul(a, b, 1)
