"""Convergence-rate sequences, reindexing, and finite-stage checks of the rank-one entropy bounds."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .certified import INF, CertifiedValue, as_fraction, float_down, float_up, log2_bounds
from .entropy_functions import GIR, HIR, EntropyFunction, HFunction, h_piece_index
from .orbit_entropy import EntropySeries, default_stage, entropy_of_names, name_measures_symbolic
from .rank_one import AlignedSet, RankOneSystem, validate_primes
from .words import short_period_weight

_REL = 2.0 ** -48


def _widen(v: float) -> CertifiedValue:
    if v == 0:
        return CertifiedValue(0.0, 0.0)
    d = abs(v) * _REL
    return CertifiedValue(math.nextafter(v - d, -INF), math.nextafter(v + d, INF))


def _h_of_log2(h: HFunction, x) -> float:
    """h(log2 x), with h read as 0 below x = 1 (log2 x <= 0)."""
    x = as_fraction(x) if not isinstance(x, float) else x
    if x <= 1:
        return 0.0
    return float(h(math.log2(x) if isinstance(x, float) else _log2_mid(x)))


def _log2_mid(q: Fraction) -> float:
    lo, hi = log2_bounds(q)
    return (lo + hi) / 2


# ----------------------------------------------------------------- sequences


@dataclass(frozen=True)
class SequenceSpec:
    """A named sequence a_n: N, Log2N, HofLog2N, PhiOf2PowMinusN, PhiOfLogIter or Custom."""

    kind: str
    h: HFunction | None = None
    g: EntropyFunction | None = None
    table: tuple | None = None  # Custom: ((n, value), ...)

    KINDS = ("N", "Log2N", "HofLog2N", "PhiOf2PowMinusN", "PhiOfLogIter", "Custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "HofLog2N" and self.h is None:
            object.__setattr__(self, "h", HIR)
        if self.kind in ("PhiOf2PowMinusN", "PhiOfLogIter") and self.g is None:
            raise ValueError(f"{self.kind} needs an entropy function")
        if self.kind == "Custom":
            if not self.table:
                raise ValueError("Custom sequences need a table")
            object.__setattr__(self, "table", tuple(sorted((int(n), v) for n, v in self.table)))

    def __call__(self, n):
        return seq_eval(self, n)

    def describe(self) -> str:
        if self.kind == "HofLog2N":
            return f"h(log2 n), h={self.h!r}"
        if self.kind in ("PhiOf2PowMinusN", "PhiOfLogIter"):
            return f"{self.kind}[{self.g.spec()}]"
        return self.kind


def seq_eval(spec: SequenceSpec, n):
    """a_n; real arguments are accepted so that real thresholds (a p_k) can be evaluated."""
    if n < 1:
        raise ValueError("sequences are evaluated at n >= 1")
    k = spec.kind
    if k == "N":
        return n
    if k == "Log2N":
        if not isinstance(n, float):
            e = _exact_log2(n)
            if e is not None:
                return e
        return math.log2(n)
    if k == "HofLog2N":
        if not isinstance(n, float):
            e = _exact_log2(n)
            if e is not None:
                v = spec.h.exact(e)
                if v is not None:
                    return v
        return spec.h(math.log2(n))
    if k == "PhiOf2PowMinusN":
        # phi_g(2**-n) = F_g(n)
        return spec.g.F(n)
    if k == "PhiOfLogIter":
        # phi_g(1/n) = F_g(log2 n): the Jensen value n g(1/n)
        e = _exact_log2(n) if not isinstance(n, float) else None
        return spec.g.F(e if e is not None else math.log2(n))
    tab = dict(spec.table)
    if n not in tab:
        raise ValueError(f"custom sequence has no value at {n}")
    return tab[n]


def _exact_log2(n):
    from .certified import log2_exact
    return log2_exact(as_fraction(n))


def check_increasing(spec: SequenceSpec, n_lo: int, n_hi: int) -> bool:
    prev = None
    for n in range(n_lo, n_hi + 1):
        v = float(seq_eval(spec, n))
        if prev is not None and not v > prev:
            return False
        prev = v
    return True


def sublinear_flag(spec: SequenceSpec, n_lo: int, n_hi: int) -> dict:
    """a_n / n over the range: reported as a diagnostic, never as a limit."""
    pts = sorted({n_lo, n_hi, (n_lo + n_hi) // 2})
    vals = [float(seq_eval(spec, n)) / n for n in pts]
    return {"points": pts, "ratios": vals, "decreasing": all(b < a for a, b in zip(vals, vals[1:]))}


@dataclass(frozen=True)
class Reindexer:
    """Thresholds n_1 < n_2 < ...; nu(a)_n = a_{n_k} for n_k <= n < n_{k+1}."""

    thresholds: tuple

    def __post_init__(self):
        th = tuple(as_fraction(t) if not isinstance(t, float) else t for t in self.thresholds)
        if not th:
            raise ValueError("need at least one threshold")
        if any(not b > a for a, b in zip(th, th[1:])):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", th)

    @classmethod
    def zeta(cls, primes) -> "Reindexer":
        """(2 q_n**2)."""
        return cls(tuple(2 * q * q for q in primes))

    @classmethod
    def scaled(cls, primes, a) -> "Reindexer":
        """(a p_n), real-valued."""
        a = as_fraction(a)
        return cls(tuple(a * p for p in primes))

    def index(self, n) -> int:
        """Largest k with thresholds[k] <= n (ValueError below the first threshold)."""
        i = bisect.bisect_right(self.thresholds, n) - 1
        if i < 0:
            raise ValueError(f"{n} lies below the first threshold {self.thresholds[0]}")
        return i

    def threshold(self, n):
        return self.thresholds[self.index(n)]


def reindex(base: SequenceSpec, nu: Reindexer, n):
    return seq_eval(base, nu.threshold(n))


# ------------------------------------------------------------------ reports


@dataclass
class RateReport:
    ratios: list = field(default_factory=list)  # (n, CertifiedValue)
    thresholds: list = field(default_factory=list)  # threshold index per ratio, or None
    window: tuple = (None, None)
    empirical_liminf: CertifiedValue | None = None
    empirical_limsup: CertifiedValue | None = None
    verdict: str = ""

    def rows(self):
        for (n, r), t in zip(self.ratios, self.thresholds):
            yield {"n": n, "ratio_lower": r.lower, "ratio_upper": r.upper, "threshold_index": t}

    def to_json(self) -> dict:
        def cv(v):
            return None if v is None else {"lower": _jnum(v.lower), "upper": _jnum(v.upper)}
        return {"window": list(self.window), "empirical_liminf": cv(self.empirical_liminf),
                "empirical_limsup": cv(self.empirical_limsup), "verdict": self.verdict,
                "ratios": [{"n": n, **cv(r), "threshold_index": t} for (n, r), t in zip(self.ratios, self.thresholds)]}


def _jnum(v):
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def _certified_seq(a, n) -> CertifiedValue:
    v = a(n)
    if isinstance(v, (int, Fraction)):
        return CertifiedValue.exact(v)
    return _widen(float(v))


def rate_report(H: EntropySeries, a, *, nu: Reindexer | None = None, c: float | None = None) -> RateReport:
    """Certified ratios H_n / a_n over the computed window (a_n reindexed along nu when given)."""
    seq = (lambda n: reindex(a, nu, n)) if nu is not None else a
    rep = RateReport()
    for n, h in H.entries:
        try:
            den = _certified_seq(seq, n)
        except ValueError:
            continue
        if not float(den.lower) > 0:
            continue
        rep.ratios.append((n, h / den))
        rep.thresholds.append(nu.index(n) if nu is not None else None)
    if not rep.ratios:
        rep.verdict = "no overlap between the series and the sequence"
        return rep
    ns = [n for n, _ in rep.ratios]
    rep.window = (min(ns), max(ns))
    los = [r.lower for _, r in rep.ratios]
    his = [r.upper for _, r in rep.ratios]
    rep.empirical_liminf = CertifiedValue(min(los, key=float), min(his, key=float))
    rep.empirical_limsup = CertifiedValue(max(los, key=float), max(his, key=float))
    w = f"n in [{rep.window[0]}, {rep.window[1]}]"
    rep.verdict = (f"on {w}: inf ratio in [{float(rep.empirical_liminf.lower):.6g}, "
                   f"{float(rep.empirical_liminf.upper):.6g}], sup ratio in "
                   f"[{float(rep.empirical_limsup.lower):.6g}, {float(rep.empirical_limsup.upper):.6g}]"
                   "; finite window only, no limit is claimed")
    if c is not None:
        ok = all(float(r.lower) >= c for _, r in rep.ratios)
        rep.verdict += f"; ratio >= {c} on the whole window: {ok}"
    return rep


def lemma53_check(H: EntropySeries, base: SequenceSpec, nu: Reindexer) -> bool:
    """For nondecreasing H: min over [n_k, n_{k+1}) of H_n / nu(a)_n >= H_{n_k} / a_{n_k}."""
    vals = dict(H.entries)
    for i, t in enumerate(nu.thresholds):
        if t not in vals:
            continue
        nxt = nu.thresholds[i + 1] if i + 1 < len(nu.thresholds) else INF
        block = [n for n in vals if t <= n < nxt]
        a_t = _certified_seq(base, t)
        ref = vals[t] / a_t
        for n in block:
            r = vals[n] / _certified_seq(lambda m: reindex(base, nu, m), n)
            if float(r.upper) < float(ref.lower):
                return False
    return True


# ------------------------------------------------------- Theorem 5.4 surrogate


def lambda_E(muE) -> Fraction | CertifiedValue:
    """lambda_E = psi(mu) / 8 with psi(x) = 2 x (1 - x)."""
    if isinstance(muE, CertifiedValue):
        lo, hi = muE.lower, muE.upper
        if not (float(lo) > 0 and float(hi) < 1):
            raise ValueError("mu(E) must lie in (0, 1)")
        # x(1-x) is concave: minimum at an endpoint, maximum at 1/2 when inside
        f = lambda x: as_fraction(x) * (1 - as_fraction(x)) / 4
        ends = [f(lo), f(hi)]
        top = f(Fraction(1, 2)) if as_fraction(lo) <= Fraction(1, 2) <= as_fraction(hi) else max(ends)
        return CertifiedValue(min(ends), top)
    m = as_fraction(muE) if not isinstance(muE, float) else muE
    if not 0 < m < 1:
        raise ValueError("mu(E) must lie in (0, 1)")
    return 2 * m * (1 - m) / 8


def mu_E(sys: RankOneSystem, E: AlignedSet) -> CertifiedValue:
    m = sys.E_measure(E)
    return CertifiedValue.exact(m) / sys.normalizer()


@dataclass
class QRMeasures:
    n: int
    P0: int
    Q_ratio: CertifiedValue  # mu(Q_n & tau_n) / mu(tau_n)
    R: CertifiedValue  # normalized mu(R_n)
    stage: int


def Q_R_measures(sys: RankOneSystem, E: AlignedSet, n: int, *, P0: int | None = None,
                 workers: int = 1) -> list[QRMeasures]:
    """Q_n: points of tower n whose 2 p_n**2-name has period <= floor(lambda_E p_n); R_n the rest.

    Names are read at stage n+1, where tower n is the part of U_{n+1} outside the spacers.
    One entry per admissible value of the floor when lambda_E is only known to an interval.
    """
    st = sys.stage(n)
    M = n + 1
    stM = sys.stage(M)
    k = 2 * st.p ** 2
    lam = lambda_E(mu_E(sys, E))
    cands = [P0] if P0 is not None else (lam * st.p).floor_candidates()
    plan = sys.plan(E)
    U, reps = plan.block(M), plan.block_reps(M)
    mask = sys.tower_mask(M)
    L = sys.normalizer()
    out = []
    x_n = st.x
    top = (k - 1) * stM.level_len
    for P in cands:
        w = short_period_weight(U, reps, k, P, mask=mask, workers=workers) if P >= 1 else 0
        q_lo = w * stM.level_len
        q_hi = min(q_lo + top, x_n)
        ratio = CertifiedValue(q_lo / x_n, q_hi / x_n)
        R = CertifiedValue(x_n - q_hi, x_n - q_lo) / L
        out.append(QRMeasures(n, P, ratio, R, M))
    return out


@dataclass
class Theorem54Report:
    n: int
    k: int
    stage: int
    H: CertifiedValue
    lam: CertifiedValue
    terms: list  # (P0, mu(R), h(log2(P0/2)), rhs with mu(R).upper, rhs with mu(R).lower)
    rhs: float
    rhs_lower_form: float
    holds: bool
    ratio: CertifiedValue
    h_denominator: float
    residual_upper: object
    Q_ratio: list

    def summary(self) -> str:
        return (f"n={self.n}: H in [{float(self.H.lower):.6f}, {float(self.H.upper):.6f}], "
                f"rhs={self.rhs:.6f}, holds={self.holds}, H/h(log2 2p^2) in "
                f"[{float(self.ratio.lower):.6f}, {float(self.ratio.upper):.6f}]")


def theorem54_check(sys: RankOneSystem, E: AlignedSet, n: int, g: EntropyFunction = GIR, *,
                    workers: int = 1, names=None) -> Theorem54Report:
    """H(g, P_{2 p_n^2}).lower >= mu(R_n).lower * h(log2(floor(lambda_E p_n)/2)) - 2, certified.

    The check uses mu(R).upper, which implies the mu(R).lower form. With the floor ambiguous,
    the right side is the largest value over the candidates. h(log2 x) is read as 0 for
    x <= 1, making the inequality vacuous there.
    """
    st = sys.stage(n)
    k = 2 * st.p ** 2
    M = n + 1
    sys.stage(M)
    if names is None:
        names = name_measures_symbolic(sys, M, E, k, workers=workers)
    H = entropy_of_names(g, names)
    lam = lambda_E(mu_E(sys, E))
    qr = Q_R_measures(sys, E, n, workers=workers)
    terms = []
    for t in qr:
        hv = _h_upper_of_log2(Fraction(t.P0, 2))
        terms.append((t.P0, t.R, hv, float_up(as_fraction(t.R.upper)) * hv - 2, float(t.R.lower) * hv - 2))
    rhs = max(tm[3] for tm in terms)
    rhs_low = max(tm[4] for tm in terms)
    den = _h_of_log2(HIR, Fraction(k))
    ratio = H / _widen(den)
    return Theorem54Report(n, k, M, H, lam, terms, rhs, rhs_low, float(H.lower) >= rhs, ratio, den,
                           names.residual.upper, [t.Q_ratio for t in qr])


def _h_upper_of_log2(x: Fraction) -> float:
    if x <= 1:
        return 0.0
    return float(HIR._up(log2_bounds(x)[1]))


# ------------------------------------------------------------- Lemma 5.8


def d_xi0(primes) -> tuple[Fraction, bool]:
    """(6 sup p_{n-1}^3/p_n + 2)(1 + sum p_{n-1}^2/p_n) + 10 over the supplied prefix.

    The second value flags that sup and sum run over a finite prefix only.
    """
    ps = [int(p) for p in primes]
    if len(ps) < 2:
        raise ValueError("d_xi0 needs at least two primes")
    sup = max(Fraction(a ** 3, b) for a, b in zip(ps, ps[1:]))
    tot = sum((Fraction(a * a, b) for a, b in zip(ps, ps[1:])), Fraction(0))
    return (6 * sup + 2) * (1 + tot) + 10, True


def fact59_B(sys: RankOneSystem, k: int, n: int) -> CertifiedValue:
    """Normalized mu(B), B = top p_n - lq levels of sigma_n plus everything outside sigma_n."""
    st = sys.stage(n)
    q = st.q
    l = (st.k * q - k) // q
    top_levels = st.p - l * q
    mass = top_levels * 2 * st.level_len
    L = sys.normalizer()
    # (m + L - x)/L = 1 - (x - m)/L is increasing in L
    lo = 1 - (st.x - mass) / as_fraction(L.lower)
    hi = 1 - (st.x - mass) / as_fraction(L.upper) if L.bounded else Fraction(1)
    return CertifiedValue(lo, hi)


def lemma58_range(sys: RankOneSystem, n: int, a) -> tuple[int, int]:
    """Integer k range [(6 p_{n-1}^2 + 1)^{5/4}, a p_n] (empty when lo > hi)."""
    q = 6 * sys.params[n - 1].p ** 2 + 1
    lo = _ceil_pow54(q)
    hi = math.floor(as_fraction(a) * sys.params[n].p)
    return lo, hi


def _ceil_pow54(q: int) -> int:
    # smallest integer k with k**4 >= q**5
    k = int(round(q ** 1.25))
    while k ** 4 < q ** 5:
        k += 1
    while k > 0 and (k - 1) ** 4 >= q ** 5:
        k -= 1
    return k


@dataclass
class Fact59Report:
    n: int
    k_range: tuple
    checked: list  # (k, k mu(B) + 1 upper, d)
    all_hold: bool | None
    note: str


def fact59_check(sys: RankOneSystem, k: int | None, n: int, a=Fraction(1, 5)) -> Fact59Report:
    """k mu(B) + 1 < d_xi0 for k in the lemma's range (or the single k given)."""
    d, _ = d_xi0(sys.primes.primes)
    lo, hi = lemma58_range(sys, n, a)
    ks = [k] if k is not None else list(range(lo, hi + 1))
    if k is None and not ks:
        return Fact59Report(n, (lo, hi), [], None, f"range [{lo}, {hi}] is empty at n={n}")
    rows = []
    for kk in ks:
        B = fact59_B(sys, kk, n)
        val = kk * B + 1
        rows.append((kk, val.upper, d))
    ok = all(float(v) < float(d) for _, v, _ in rows)
    note = "" if (lo <= (k or lo) <= hi) else f"k outside [{lo}, {hi}]; evaluated anyway"
    return Fact59Report(n, (lo, hi), rows, ok, note)


@dataclass
class Lemma58Report:
    n: int
    k: int
    bound: float
    parts: dict
    conditions: dict
    in_range: bool
    H: CertifiedValue | None = None
    holds: bool | None = None


def lemma58_bound(sys: RankOneSystem, k: int, n: int, eps, a, r: int, *, g: EntropyFunction = GIR,
                  strict: bool = True) -> Lemma58Report:
    """r(2^-m1 log2 6p^2 + 2^{m1+1}) + d + 2 + (k/p_n)(1+eps)[2^-m2 log2 k + 2^-m2 + 2^{m2+1}].

    p = p_{n-1}; 6p^2 lies in [2^{4^m1}, 2^{4^{m1+1}}) and 12p^2 + k in [2^{4^m2}, 2^{4^{m2+1}}).
    strict=False evaluates outside the lemma's k range and reports the failed conditions.
    """
    if n < 1:
        raise ValueError("the lemma needs n >= 1")
    if g.kind != "GIR":
        raise ValueError("the bound is stated for the h-based function GIR")
    eps, a = as_fraction(eps), as_fraction(a)
    p_prev = sys.params[n - 1].p
    p_n = sys.params[n].p
    lo, hi = lemma58_range(sys, n, a)
    in_range = lo <= k <= hi
    if strict and not in_range:
        raise ValueError(f"k={k} outside [{lo}, {hi}]")
    q = 6 * p_prev ** 2 + 1
    L = sys.normalizer()
    tau_lo = sys.params[n].x / as_fraction(L.upper) if L.bounded else Fraction(0)
    conditions = {
        "mu_tau_n_gt_half": bool(tau_lo > Fraction(1, 2)),
        "a_p_n_gt_q_pow_5_4": bool((a * p_n) ** 4 > Fraction(q) ** 5),
        "two_over_q_quarter_lt_eps": bool(Fraction(16) < eps ** 4 * q),  # 2/q^{1/4} < eps
        "q_over_p_n_lt_a": bool(Fraction(q, p_n) < a),
        "p_n_lt_p_prev_pow_2r": bool(p_n < p_prev ** (2 * r)),
        "a_lt_quarter": bool(0 < a < Fraction(1, 4)),
    }
    m1 = h_piece_index(6 * p_prev ** 2)
    m2 = h_piece_index(12 * p_prev ** 2 + k)
    d, _ = d_xi0(sys.primes.primes)
    l6 = log2_bounds(Fraction(6 * p_prev ** 2))[1]
    lk = log2_bounds(Fraction(k))[1]
    part_A = r * (2.0 ** -m1 * l6 + 2.0 ** (m1 + 1))
    part_C = float_up(Fraction(k, p_n) * (1 + eps)) * (2.0 ** -m2 * lk + 2.0 ** -m2 + 2.0 ** (m2 + 1))
    # shade down so float rounding never lifts the bound above its exact value
    bound = (float_down(d) + 2 + part_A + part_C) * (1 - 1e-12)
    parts = {"A": part_A, "d": float(d), "C": part_C, "m1": m1, "m2": m2, "range": (lo, hi)}
    return Lemma58Report(n, k, bound, parts, conditions, in_range)


def lemma58_verify(sys: RankOneSystem, k: int, n: int, eps, a, r: int, *, g: EntropyFunction = GIR,
                   strict: bool = True, M: int | None = None, workers: int = 1) -> Lemma58Report:
    rep = lemma58_bound(sys, k, n, eps, a, r, g=g, strict=strict)
    if M is None:
        M = default_stage(sys, k)
    names = name_measures_symbolic(sys, M, AlignedSet.unit(), k, workers=workers)
    rep.H = entropy_of_names(g, names)
    rep.holds = float(rep.H.upper) <= rep.bound
    return rep


# --------------------------------------------------- non-isomorphism criterion


@dataclass
class NonisoReport:
    verdict: str  # criterion-satisfied-on-range, not-satisfied, insufficient-data
    infimum: float | None
    at_n: object
    target: float
    gamma0_ratios: list
    growth_condition: list
    window: tuple
    evidence: list  # (n, ratio, index in a*xi0, index in zeta)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "infimum": self.infimum, "at_n": _jnum(self.at_n) if self.at_n is not None else None,
                "target": self.target, "window": [_jnum(w) for w in self.window],
                "gamma0_ratios": [float(x) for x in self.gamma0_ratios],
                "growth_condition": self.growth_condition,
                "evidence": [{"n": _jnum(n), "ratio": r, "i_xi0": i, "i_zeta": j} for n, r, i, j in self.evidence]}


def _h_log2_float(x) -> float:
    """h(log2 x) for a threshold x >= 1 (exact rational log when possible)."""
    if x < 1:
        return 0.0
    lo, hi = log2_bounds(as_fraction(x))
    return float(HIR((lo + hi) / 2))


def nonisomorphism_report(xi0, xi, a, b, r: int, n_range: tuple) -> NonisoReport:
    """Finite-range infimum of a xi0(h(log2 n)) / zeta(h(log2 n)) against b/(2r).

    Both numerator and denominator are step functions of n, so the infimum over the range is
    attained at the range start or at a threshold inside it.
    """
    a, b = as_fraction(a), as_fraction(b)
    if not (a > 0 and b > 0):
        raise ValueError("need a, b > 0")
    if a + b >= Fraction(1, 4):
        raise ValueError("need a + b < 1/4")
    if r < 1:
        raise ValueError("r must be a positive integer")
    p = [int(v) for v in xi0]
    q = [int(v) for v in xi]
    gamma0 = [Fraction(x ** 3, y) for x, y in zip(p, p[1:])]
    growth = [bool(y < x ** (2 * r)) for x, y in zip(p, p[1:])]
    num = Reindexer.scaled(p, a)
    den = Reindexer.zeta(q)
    target = float(b) / (2 * r)
    lo_n, hi_n = as_fraction(n_range[0]), as_fraction(n_range[1])
    start = max(lo_n, num.thresholds[0], den.thresholds[0], Fraction(1))
    pts = {start}
    pts.update(t for t in num.thresholds if start <= t <= hi_n)
    pts.update(t for t in den.thresholds if start <= t <= hi_n)
    evidence = []
    for n in sorted(pts):
        if n > hi_n:
            continue
        i, j = num.index(n), den.index(n)
        hn = _h_log2_float(num.thresholds[i])
        hd = _h_log2_float(den.thresholds[j])
        if hd <= 0:
            continue
        evidence.append((n, hn / hd, i, j))
    window = (start, hi_n)
    if not evidence:
        return NonisoReport("insufficient-data", None, None, target, gamma0, growth, window, [])
    n_best, best, _, _ = min(evidence, key=lambda e: e[1])
    verdict = "criterion-satisfied-on-range" if best < target else "not-satisfied"
    return NonisoReport(verdict, best, n_best, target, gamma0, growth, window, evidence)


def search_synthetic_pair(a=Fraction(1, 10000), b=Fraction(2498, 10000), r: int = 2,
                          min_numerator_threshold=2) -> dict | None:
    """Search valid prime pairs (xi0, xi) whose finite-range infimum falls below b/(2r).

    xi0 = (p0, p1) with a p0 just above min_numerator_threshold and p1 the largest prime
    below p0^{2r}; xi = (2, 29, q) with 2 q^2 as large as the range [2 q^2, a p1) allows.
    """
    a, b = as_fraction(a), as_fraction(b)
    p0 = int(sympy.nextprime(math.ceil(min_numerator_threshold / a) - 1))
    for _ in range(50):
        p1 = int(sympy.prevprime(p0 ** (2 * r)))
        if p1 <= 6 * p0 * p0 + 1:
            p0 = int(sympy.nextprime(p0))
            continue
        xi0 = validate_primes([p0, p1]).primes
        qmax = math.isqrt(int(a * p1 / 2))
        qc = int(sympy.prevprime(qmax + 1)) if qmax > 5047 else None
        if qc is None or qc <= 6 * 29 ** 2 + 1:
            p0 = int(sympy.nextprime(p0))
            continue
        xi = validate_primes([2, 29, qc]).primes
        rep = nonisomorphism_report(xi0, xi, a, b, r, (1, a * p1))
        if rep.verdict == "criterion-satisfied-on-range":
            return {"xi0": xi0, "xi": xi, "a": a, "b": b, "r": r, "report": rep}
        p0 = int(sympy.nextprime(p0))
    return None


__all__ = [
    "SequenceSpec", "seq_eval", "check_increasing", "sublinear_flag", "Reindexer", "reindex",
    "RateReport", "rate_report", "lemma53_check", "lambda_E", "mu_E", "QRMeasures", "Q_R_measures",
    "Theorem54Report", "theorem54_check", "d_xi0", "fact59_B", "fact59_check", "lemma58_range",
    "Lemma58Report", "lemma58_bound", "lemma58_verify", "NonisoReport", "nonisomorphism_report",
    "search_synthetic_pair",
]
