"""Entropy functions g (concave on [0,1], g(0)=0) and the growth functions h.

Every catalog member is written as g(x) = x * F(-log2 x) with F nondecreasing.
Evaluating through F keeps tiny arguments such as 2**-1682 exact or stable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .certified import (
    CertifiedValue,
    as_fraction,
    down,
    float_down,
    float_up,
    log2_bounds,
    log2_exact,
    mul_down,
    mul_up,
    up,
)

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2
_REL = 2.0 ** -46  # widening for float evaluations of F (a handful of libm calls)
TINY = 1e-300


def _widen(v: float) -> tuple[float, float]:
    a = abs(v) * _REL + TINY
    return v - a, v + a


# --------------------------------------------------------------------------- h


def hir_piece(x: Fraction | int | float) -> int:
    """Piece index k with x in [4**k, 4**(k+1)); -1 on the linear piece [0,1)."""
    if x < 1:
        return -1
    if isinstance(x, float):
        k = int(math.floor(math.log(x, 4)))
        while 4.0 ** (k + 1) <= x:
            k += 1
        while 4.0 ** k > x:
            k -= 1
        return k
    q = as_fraction(x)
    fl = q.numerator // q.denominator
    return (fl.bit_length() - 1) // 2


def hir_piece_value(k: int, x):
    """The affine formula of piece k, evaluated anywhere (used for continuity checks)."""
    if k < 0:
        return x
    return x / Fraction(2) ** k + (2 ** (k + 1) - 2) if not isinstance(x, float) else x / 2.0 ** k + (2 ** (k + 1) - 2)


class HFunction:
    """Growth function h: HIR (piecewise, Iksanow-Rosler), HLog = log2(1+x), or HLog iterated m times."""

    def __init__(self, kind: str, m: int = 1):
        if kind not in ("HIR", "HLog", "HLogIter"):
            raise ValueError(f"unknown h kind {kind!r}")
        if kind == "HLog":
            m = 1
        if m < 0:
            raise ValueError("iteration count must be >= 0")
        self.kind = kind
        self.m = m

    def __repr__(self):
        return "HIR" if self.kind == "HIR" else f"HLogIter({self.m})"

    def __eq__(self, other):
        return isinstance(other, HFunction) and (self.kind == "HIR") == (other.kind == "HIR") and (
            self.kind == "HIR" or self.m == other.m
        )

    def __hash__(self):
        return hash((self.kind == "HIR", self.m))

    def __call__(self, x):
        if x < 0:
            raise ValueError("h is defined on [0, inf)")
        if self.kind == "HIR":
            return hir_piece_value(hir_piece(x), x)
        v = x
        for _ in range(self.m):
            if isinstance(v, float):
                v = math.log1p(v) * LOG2E
            else:
                e = log2_exact(1 + as_fraction(v))
                v = e if e is not None else math.log1p(float(v)) * LOG2E
        return v

    def exact(self, x) -> Fraction | None:
        if isinstance(x, float):
            x = Fraction(x)
        if self.kind == "HIR":
            return hir_piece_value(hir_piece(x), as_fraction(x))
        v = as_fraction(x)
        for _ in range(self.m):
            v = log2_exact(1 + v)
            if v is None:
                return None
        return v

    def bounds(self, lo, hi) -> tuple:
        """Enclosure of h over [lo, hi]; h is nondecreasing."""
        return self._down(lo), self._up(hi)

    def _down(self, x):
        if self.kind == "HIR":
            return hir_piece_value(hir_piece(as_fraction(x)), as_fraction(x))
        v = x
        for _ in range(self.m):
            if not isinstance(v, float):
                e = log2_exact(1 + as_fraction(v))
                if e is not None:
                    v = e
                    continue
                v = log2_bounds(1 + as_fraction(v))[0]
            else:
                v = max(0.0, _widen(math.log1p(v) * LOG2E)[0])
        return v

    def _up(self, x):
        if self.kind == "HIR":
            return hir_piece_value(hir_piece(as_fraction(x)), as_fraction(x))
        v = x
        for _ in range(self.m):
            if not isinstance(v, float):
                e = log2_exact(1 + as_fraction(v))
                if e is not None:
                    v = e
                    continue
                v = log2_bounds(1 + as_fraction(v))[1]
            else:
                v = _widen(math.log1p(v) * LOG2E)[1]
        return v

    def derivative(self, x: float) -> float:
        if self.kind == "HIR":
            return 2.0 ** -hir_piece(x) if x >= 1 else 1.0
        d = 1.0
        v = x
        for _ in range(self.m):
            d *= 1.0 / ((1.0 + v) * LN2)
            v = math.log1p(v) * LOG2E
        return d


HIR = HFunction("HIR")
HLOG = HFunction("HLog")


def h_piece_index(v) -> int:
    """Unique m with v in [2**(4**m), 2**(4**(m+1))); -1 (linear-piece sentinel) for v < 2."""
    if v < 1:
        raise ValueError("h_piece_index needs v >= 1")
    if v < 2:
        return -1
    # floor(log2 v), exactly for rationals
    if isinstance(v, float):
        b = math.frexp(v)[1] - 1
    else:
        q = as_fraction(v)
        fl = q.numerator // q.denominator
        b = fl.bit_length() - 1
    # v >= 2**(4**m)  <=>  floor(log2 v) >= 4**m since 4**m is an integer
    return (b.bit_length() - 1) // 2


def gir_piecewise(x):
    """Direct piecewise form of x * HIR(-log2 x), written piece by piece in x.

    Used as an independent oracle for the F-based evaluator.
    """
    x = as_fraction(x)
    if x == 0:
        return Fraction(0)
    if x > Fraction(1, 2):
        return -x * math.log2(x) if log2_exact(x) is None else -x * log2_exact(x)
    k = 0
    while not (Fraction(1, 2 ** (4 ** (k + 1))) < x <= Fraction(1, 2 ** (4 ** k))):
        k += 1
    lg = log2_exact(x)
    if lg is None:
        lg = math.log2(x.numerator) - math.log2(x.denominator)
        return -(2.0 ** -k) * float(x) * lg + float(x) * (2 ** (k + 1) - 2)
    return -Fraction(1, 2 ** k) * x * lg + x * (2 ** (k + 1) - 2)


# ----------------------------------------------------------------- g functions


@dataclass(frozen=True)
class PropertyReport:
    property: str
    passed: bool
    samples: int
    counterexample: tuple | None = None

    def __bool__(self):
        return self.passed


class EntropyFunction:
    """A member of the class of entropy functions, evaluated via g(x) = x F(-log2 x).

    kinds: Eta, G0(a), GTilde(a, alpha), GIR, GM(m), Custom(tabulated knots).
    """

    def __init__(self, kind: str, *, a: float = 2, alpha: float = 0.5, m: int = 0,
                 knots: Sequence[tuple] | None = None, validate: bool = True, label: str | None = None):
        self.kind = kind
        self.a = a
        self.alpha = alpha
        self.m = m
        self.label = label
        if kind == "G0" or kind == "GTilde":
            if not a > 1:
                raise ValueError("base a must exceed 1")
            self._log2a_exact = log2_exact(as_fraction(a)) if not isinstance(a, float) or a.is_integer() else None
            self._log2a = math.log2(a)
        if kind == "GTilde" and not 0 < alpha < 1:
            raise ValueError("exponent alpha must lie in (0,1)")
        if kind == "GM" and m < 0:
            raise ValueError("level m must be >= 0")
        if kind == "GM":
            self._h = HFunction("HLogIter", m + 1)
        if kind == "Custom":
            self._init_custom(knots, validate)
        elif kind not in ("Eta", "G0", "GTilde", "GIR", "GM"):
            raise ValueError(f"unknown entropy function kind {kind!r}")

    # constructors -----------------------------------------------------------
    @classmethod
    def eta(cls):
        return cls("Eta")

    @classmethod
    def g0(cls, a=2):
        return cls("G0", a=a)

    @classmethod
    def gtilde(cls, a=2, alpha=0.5):
        return cls("GTilde", a=a, alpha=alpha)

    @classmethod
    def gir(cls):
        return cls("GIR")

    @classmethod
    def gm(cls, m=1):
        return cls("GM", m=m)

    @classmethod
    def custom(cls, knots, validate=True, label=None):
        return cls("Custom", knots=knots, validate=validate, label=label)

    @classmethod
    def linear(cls):
        return cls.custom([(0, 0), (1, 1)], label="linear")

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        knots = []
        for r in rows:
            try:
                knots.append((Fraction(r[0].strip()), Fraction(r[1].strip())))
            except ValueError:
                continue  # header line
        return cls.custom(knots, label=f"custom:file={path}")

    def _init_custom(self, knots, validate):
        if not knots:
            raise ValueError("custom function needs knots")
        pts = sorted((as_fraction(x), as_fraction(y)) for x, y in knots)
        if pts[0][0] != 0:
            pts.insert(0, (Fraction(0), Fraction(0)))
        xs = [p[0] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("custom knots must have strictly increasing x")
        if pts[0][1] != 0 or xs[-1] != 1 or xs[0] != 0:
            raise ValueError("custom knots must span [0,1] with g(0)=0")
        slopes = [(y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(pts, pts[1:])]
        self._concave = all(s2 <= s1 for s1, s2 in zip(slopes, slopes[1:]))
        if validate and not self._concave:
            raise ValueError("custom tabulation is not concave")
        self._knots = pts
        self._slopes = slopes

    # description --------------------------------------------------------------
    def __repr__(self):
        return self.spec()

    def spec(self) -> str:
        if self.kind == "Eta":
            return "eta"
        if self.kind == "G0":
            return f"g0:a={self.a}"
        if self.kind == "GTilde":
            return f"gtilde:a={self.a},alpha={self.alpha}"
        if self.kind == "GIR":
            return "gir"
        if self.kind == "GM":
            return f"gm:m={self.m}"
        return self.label or "custom"

    # F(y) = phi(2**-y) -------------------------------------------------------
    def F(self, y):
        """phi evaluated at 2**-y (nondecreasing in y >= 0)."""
        e = self.F_exact(y) if not isinstance(y, float) else None
        if e is not None:
            return e
        lo, hi = self.F_bounds(y, y)
        return lo if lo == hi else (float(lo) + float(hi)) / 2

    def F_exact(self, y) -> Fraction | None:
        y = as_fraction(y)
        k = self.kind
        if k == "Eta":
            return y
        if k == "GIR":
            return HIR.exact(y)
        if k == "GM":
            return self._h.exact(y)
        if k == "G0":
            if self._log2a_exact is None:
                return None
            e = log2_exact(1 + y / self._log2a_exact)
            return None if e is None else e / self._log2a_exact
        if k == "GTilde":
            if self._log2a_exact is None:
                return None
            base = y / self._log2a_exact
            if base == 0:
                return Fraction(0)
            al = as_fraction(self.alpha)
            # exact only for perfect powers, e.g. 4**(1/2)
            r = _rational_power(base, al)
            return r
        if k == "Custom":
            if y.denominator != 1 or y > 4096:
                return None
            x = Fraction(1, 2 ** int(y))
            return self._custom_g(x) / x
        return None

    def F_bounds(self, ylo, yhi) -> tuple:
        """Enclosure of F over [ylo, yhi] (monotone)."""
        return self._F_down(ylo), self._F_up(yhi)

    def _F_down(self, y):
        if not isinstance(y, float):
            e = self.F_exact(y)
            if e is not None:
                return e
        return self._F_float(y, -1)

    def _F_up(self, y):
        if not isinstance(y, float):
            e = self.F_exact(y)
            if e is not None:
                return e
        return self._F_float(y, 1)

    def _F_float(self, y, direction):
        k = self.kind
        if k == "GIR":
            return HIR.exact(as_fraction(y))
        if k == "GM":
            return self._h._down(y) if direction < 0 else self._h._up(y)
        if k == "Custom":
            return self._custom_F_float(float(y), direction)
        yf = float_down(y) if direction < 0 else float_up(y)
        if k == "Eta":
            return yf
        if k == "G0":
            v = math.log1p(yf / self._log2a) / LN2 / self._log2a
        else:  # GTilde
            v = (yf / self._log2a) ** self.alpha if yf > 0 else 0.0
        lo, hi = _widen(v)
        return max(lo, 0.0) if direction < 0 else hi

    # custom helpers ----------------------------------------------------------
    def _custom_g(self, x: Fraction) -> Fraction:
        pts = self._knots
        lo, hi = 0, len(pts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pts[mid][0] <= x:
                lo = mid
            else:
                hi = mid
        (x1, y1), s = pts[lo], self._slopes[lo]
        return y1 + s * (x - x1)

    def _custom_F_float(self, y: float, direction: int):
        # phi(x) = g(x)/x is monotone, so bracket x = 2**-y by two floats and evaluate exactly.
        xf = 2.0 ** -y if y < 1070 else 0.0
        x_side = up(xf, 4) if direction < 0 else down(xf, 4)
        first = self._knots[1][0]
        if x_side <= 0 or Fraction(x_side) <= first:
            return self._slopes[0]
        x = min(Fraction(x_side), Fraction(1))
        return self._custom_g(x) / x

    # evaluation ----------------------------------------------------------------
    def __call__(self, x):
        return self.value(x)

    def value(self, x):
        """g(x): a Fraction when exact, otherwise a float within outward-rounding width."""
        lo, hi = self.bounds(x)
        if lo == hi:
            return lo
        return (float(lo) + float(hi)) / 2

    def bounds(self, x) -> tuple:
        """Certified enclosure (lo, hi) of g(x)."""
        if x < 0 or x > 1:
            raise ValueError(f"entropy functions are defined on [0,1], got {x}")
        if x == 0:
            return Fraction(0), Fraction(0)
        if self.kind == "Custom":
            if isinstance(x, float):
                v = self._custom_g(Fraction(x))
                return v, v
            v = self._custom_g(as_fraction(x))
            return v, v
        if not isinstance(x, float):
            xq = as_fraction(x)
            lg = log2_exact(xq)
            if lg is not None:
                e = self.F_exact(-lg)
                if e is not None:
                    return xq * e, xq * e
            lo2, hi2 = log2_bounds(xq)
            flo, fhi = self.F_bounds(max(-hi2, 0.0), max(-lo2, 0.0))
            return mul_down(xq, flo), mul_up(xq, fhi)
        lo2, hi2 = log2_bounds(x)
        flo, fhi = self.F_bounds(max(-hi2, 0.0), max(-lo2, 0.0))
        return mul_down(x, flo), mul_up(x, fhi)

    def phi(self, x):
        if x <= 0:
            raise ValueError("phi is defined on (0,1]")
        if self.kind == "Custom":
            xq = as_fraction(x)
            return self._custom_g(xq) / xq
        if not isinstance(x, float):
            lg = log2_exact(as_fraction(x))
            if lg is not None:
                e = self.F_exact(-lg)
                if e is not None:
                    return e
        return self.F(-math.log2(float(x)))

    def certified(self, x) -> CertifiedValue:
        lo, hi = self.bounds(x)
        return CertifiedValue(lo, hi)

    def bounds_on(self, a, b) -> tuple:
        """Enclosure of g over the interval [a, b] via concavity.

        The minimum sits at an endpoint; the maximum at an endpoint or at the interior argmax.
        """
        a = max(a, 0) if not isinstance(a, float) else max(a, 0.0)
        b = min(b, 1) if not isinstance(b, float) else min(b, 1.0)
        la, ha = self.bounds(a)
        lb, hb = self.bounds(b)
        lo = la if la <= lb else lb
        hi = ha if ha >= hb else hb
        xs, gmax = self._argmax
        if a <= xs <= b:
            cand = up(gmax, 8) + 1e-12
            if cand > hi:
                hi = cand
        return lo, hi

    # derived quantities ---------------------------------------------------------
    @cached_property
    def _argmax(self) -> tuple[float, float]:
        if self.kind == "Custom":
            best = max(self._knots, key=lambda p: p[1])
            return float(best[0]), float(best[1])
        f = lambda t: float(self.value(t))
        lo, hi = 0.0, 1.0
        invphi = (math.sqrt(5) - 1) / 2
        c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
        fc, fd = f(c), f(d)
        for _ in range(200):
            if hi - lo < 1e-15:
                break
            if fc >= fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = f(d)
        xs = (lo + hi) / 2
        return xs, max(f(xs), fc, fd, f(1.0))

    @cached_property
    def d_max(self) -> float:
        if self.kind == "Custom" and not self._concave:
            raise ValueError("d_max requires a concave function")
        _, gmax = self._argmax
        g1 = float(self.value(1))
        return gmax - min(0.0, g1)

    @cached_property
    def left_deriv_half(self) -> float:
        k = self.kind
        if k in ("Eta", "GIR"):
            # GIR coincides with eta on (2**-4, 1]
            return 1.0 - LOG2E
        if k == "G0":
            la = math.log(self.a)
            t = 1.0 + LN2 / la  # 1 - log_a(1/2)
            return math.log(t) / la - 1.0 / (t * la * la)
        if k == "GTilde":
            la = math.log(self.a)
            u = LN2
            al = self.alpha
            return (u / la) ** al - al * u ** (al - 1) / la ** al
        if k == "GM":
            return float(self._h(1.0)) - self._h.derivative(1.0) / LN2
        # tabulated: exact left slope at 1/2
        half = Fraction(1, 2)
        for (x1, _), (x2, _), s in zip(self._knots, self._knots[1:], self._slopes):
            if x1 < half <= x2:
                return float(s)
        raise AssertionError("unreachable")

    @cached_property
    def detected_class(self):
        return classify(self, 256)


def _rational_power(base: Fraction, al: Fraction) -> Fraction | None:
    """base**al when it is rational, else None."""
    p, q = al.numerator, al.denominator
    n, d = base.numerator, base.denominator
    rn, rd = _int_root(n, q), _int_root(d, q)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd) ** p


def _int_root(n: int, q: int) -> int | None:
    r = round(n ** (1.0 / q)) if n < 2 ** 1000 else None
    if r is None:
        return None
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** q == n:
            return c
    return None


ETA = EntropyFunction.eta()
G0_2 = EntropyFunction.g0(2)
GIR = EntropyFunction.gir()


def catalog() -> list[EntropyFunction]:
    """Representative catalog members used by the property suites."""
    return [ETA, G0_2, EntropyFunction.g0(3), EntropyFunction.gtilde(2, 0.5), GIR,
            EntropyFunction.gm(0), EntropyFunction.gm(1)]


# --------------------------------------------------------------- operations


def eval_at(f, x):
    """Evaluate an entropy function or an h function."""
    return f(x)


def phi_of(f: EntropyFunction, x):
    return f.phi(x)


def jensen_bound(f: EntropyFunction, n: int):
    """N g(1/N) = phi(1/N)."""
    if n < 1:
        raise ValueError("N must be >= 1")
    if n == 1:
        return f.value(1)
    lg = log2_exact(Fraction(n))
    if lg is not None:
        e = f.F_exact(lg)
        if e is not None:
            return e
    if f.kind == "Custom":
        return f.phi(Fraction(1, n))
    lo, hi = log2_bounds(Fraction(n))
    flo, fhi = f.F_bounds(lo, hi)
    return (float(flo) + float(fhi)) / 2


def jensen_bound_upper(f: EntropyFunction, n: int):
    """Certified upper end of jensen_bound (for inequality checks)."""
    if n == 1:
        return f.bounds(1)[1]
    lg = log2_exact(Fraction(n))
    if lg is not None:
        e = f.F_exact(lg)
        if e is not None:
            return e
    if f.kind == "Custom":
        return f.phi(Fraction(1, n))
    lo, hi = log2_bounds(Fraction(n))
    return f.F_bounds(lo, hi)[1]


@dataclass(frozen=True)
class ClassVerdict:
    cls: str  # G00, G0Sh, G0Inf, Unknown
    ratio: float  # r at the sampled depth
    depth: int
    constant: float | None = None
    ratios: tuple = field(default=(), repr=False)

    def __str__(self):
        if self.cls == "G0Sh":
            return f"G0Sh(C={self.constant:.6g}) at depth {self.depth}"
        return f"{self.cls} (r_{self.depth}={self.ratio:.6g}, finite-sample verdict)"


CLASS_LOW = 0.2
CLASS_HIGH = 5.0
CLASS_STABLE = 1e-3
CLASS_WINDOW = 10


def classify(f: EntropyFunction, dyadic_depth: int) -> ClassVerdict:
    """Finite-sample class verdict from r_j = g(2**-j)/eta(2**-j) = F(j)/j, j <= depth."""
    if dyadic_depth < 8:
        raise ValueError("dyadic_depth must be >= 8")
    r = [float(f.F(Fraction(j))) / j for j in range(1, dyadic_depth + 1)]
    tail = r[-(CLASS_WINDOW + 1):]
    last = r[-1]
    decreasing = all(b < a for a, b in zip(tail, tail[1:]))
    increasing = all(b > a for a, b in zip(tail, tail[1:]))
    if last < CLASS_LOW and decreasing:
        return ClassVerdict("G00", last, dyadic_depth, ratios=tuple(r))
    if last > CLASS_HIGH and increasing:
        return ClassVerdict("G0Inf", last, dyadic_depth, ratios=tuple(r))
    if abs(last - tail[0]) < CLASS_STABLE:
        return ClassVerdict("G0Sh", last, dyadic_depth, constant=last, ratios=tuple(r))
    return ClassVerdict("Unknown", last, dyadic_depth, ratios=tuple(r))


def property_check(f: EntropyFunction, prop: str, samples: int, seed: int, tol: float = 1e-12) -> PropertyReport:
    """Randomized check of Subadditive, Subderivative, Concave or PhiDecreasing."""
    if samples < 100:
        raise ValueError("samples must be >= 100")
    rng = np.random.default_rng(seed)

    def draw():
        # half the draws are log-uniform to probe the behaviour near 0
        if rng.random() < 0.5:
            return float(rng.random())
        return float(2.0 ** -rng.uniform(0, 60))

    g = lambda t: float(f.value(t))
    for _ in range(samples):
        x, y = draw(), draw()
        if prop == "Subadditive":
            if x + y > 1:
                x, y = 1 - x, 1 - y
            s = min(x + y, 1.0)
            lhs, rhs = g(s), g(x) + g(y)
        elif prop == "Subderivative":
            lhs, rhs = g(x * y), x * g(y) + y * g(x)
        elif prop == "Concave":
            lam = float(rng.random())
            z = min(max(lam * x + (1 - lam) * y, 0.0), 1.0)
            lhs, rhs = lam * g(x) + (1 - lam) * g(y), g(z)
        elif prop == "PhiDecreasing":
            if x == 0 or y == 0:
                continue
            x, y = min(x, y), max(x, y)
            lhs, rhs = g(y) / y, g(x) / x
        else:
            raise ValueError(f"unknown property {prop!r}")
        if lhs > rhs + tol * max(1.0, abs(rhs)):
            return PropertyReport(prop, False, samples, (x, y, lhs, rhs))
    return PropertyReport(prop, True, samples)


def sampled_h_criterion(f: EntropyFunction, samples: int, seed: int, y_max: float = 64.0,
                        tol: float = 1e-12) -> PropertyReport:
    """Sampled check that F(y) = 2**y g(2**-y) is concave, subadditive and increasing on [0, y_max].

    Passing is evidence for membership in the subderivative class, not a proof.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    rng = np.random.default_rng(seed)
    F = lambda y: float(f.F(float(y)))
    for _ in range(samples):
        x, y = sorted(float(v) for v in rng.uniform(0.0, y_max, 2))
        lam = float(rng.random())
        fx, fy = F(x), F(y)
        scale = tol * max(1.0, abs(fx), abs(fy))
        if fy < fx - scale:
            return PropertyReport("HIncreasing", False, samples, (x, y, fx, fy))
        mid = F(lam * x + (1 - lam) * y)
        if lam * fx + (1 - lam) * fy > mid + scale:
            return PropertyReport("HConcave", False, samples, (x, y, lam, mid))
        if x + y <= y_max and F(x + y) > fx + fy + scale:
            return PropertyReport("HSubadditive", False, samples, (x, y, F(x + y), fx + fy))
    return PropertyReport("HCriterion", True, samples)


def parse_function_spec(spec: str) -> EntropyFunction:
    """Parse `eta`, `g0:a=2`, `gtilde:a=2,alpha=0.5`, `gir`, `gm:m=1`, `custom:file=...`."""
    name, _, rest = spec.strip().partition(":")
    params = {}
    if rest:
        for part in rest.split(","):
            k, _, v = part.partition("=")
            params[k.strip()] = v.strip()
    name = name.lower()

    def num(v):
        q = Fraction(v)
        return int(q) if q.denominator == 1 else float(q)

    if name == "eta":
        return ETA
    if name == "g0":
        return EntropyFunction.g0(num(params.get("a", "2")))
    if name == "gtilde":
        return EntropyFunction.gtilde(num(params.get("a", "2")), float(Fraction(params.get("alpha", "0.5"))))
    if name == "gir":
        return GIR
    if name == "gm":
        return EntropyFunction.gm(int(params.get("m", "1")))
    if name == "linear":
        return EntropyFunction.linear()
    if name == "custom":
        if "file" not in params:
            raise ValueError("custom functions need file=...")
        return EntropyFunction.from_csv(params["file"])
    raise ValueError(f"unknown function specifier {spec!r}")


def integral_test(phi: Callable[[float], float], x_max: float = 1e12, checkpoints: int = 12) -> dict:
    """Quadrature diagnostic for the integral of phi(x)/x**2 over [1, x_max].

    Substitutes x = e**t. Reports partial integrals at log-spaced checkpoints and the
    increment ratio; it labels phi, it does not decide convergence.
    """
    from scipy.integrate import quad

    ts = np.linspace(0.0, math.log(x_max), checkpoints + 1)
    partial, total = [], 0.0
    for t0, t1 in zip(ts, ts[1:]):
        v, _ = quad(lambda t: phi(math.exp(t)) * math.exp(-t), t0, t1, limit=200)
        total += v
        partial.append((math.exp(t1), total))
    incs = [b[1] - a[1] for a, b in zip(partial, partial[1:])]
    ratio = incs[-1] / incs[-2] if len(incs) >= 2 and incs[-2] > 0 else float("nan")
    label = "likely-finite" if ratio < 0.9 else "likely-infinite"
    return {"partial": partial, "last_increment": incs[-1] if incs else 0.0,
            "increment_ratio": ratio, "label": label, "x_max": x_max}
