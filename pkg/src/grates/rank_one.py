"""Exact construction of the Gamma family of rank-one cutting-and-stacking systems.

Stage n is a tower of 2 p_n**2 levels of length l_n. Every level's left endpoint is an
integer multiple of l_n, so a stage is stored as an integer array: levels[i] = left
endpoint of level i (bottom = 0) in units of l_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy

from .certified import CertifiedValue, INF
from .geometry import IntervalSet, PiecewiseTranslation, canonicalize
from .words import SubstitutionPlan, DEFAULT_MEMORY_BUDGET_SYMBOLS

DEFAULT_LEVEL_BUDGET = 60_000_000  # int64 levels kept in memory (stage 2 of (2,29,5051) has 5.1e7)
STAGE_MAP_PIECE_LIMIT = 400_000  # Fraction-based maps beyond this are checked with integer arrays


class PrimeSequenceError(ValueError):
    def __init__(self, msg, index):
        super().__init__(f"{msg} (index {index})")
        self.index = index


@dataclass(frozen=True)
class PrimeSeq:
    primes: tuple
    summability_verified: bool = False  # infinite condition; never verifiable from a prefix

    def __len__(self):
        return len(self.primes)

    def __getitem__(self, i):
        return self.primes[i]


def validate_primes(seq) -> PrimeSeq:
    """Primality plus the per-pair condition (6 p_n**2 + 1) / p_{n+1} < 1."""
    seq = [int(p) for p in seq]
    if not seq:
        raise ValueError("prime sequence is empty")
    for i, p in enumerate(seq):
        if not sympy.isprime(p):
            raise PrimeSequenceError(f"{p} is not prime", i)
    for i in range(len(seq) - 1):
        if 6 * seq[i] ** 2 + 1 >= seq[i + 1]:
            raise PrimeSequenceError(
                f"ratio (6*{seq[i]}**2+1)/{seq[i + 1]} = {Fraction(6 * seq[i] ** 2 + 1, seq[i + 1])} is not < 1", i + 1)
    return PrimeSeq(tuple(seq))


def next_valid_prime(p: int, at_least: int | None = None) -> int:
    """Smallest prime exceeding max(6 p**2 + 1, at_least - 1)."""
    lo = 6 * p * p + 1
    if at_least is not None:
        lo = max(lo, at_least - 1)
    return int(sympy.nextprime(lo))


@dataclass(frozen=True)
class StageParams:
    n: int
    p: int
    height: int
    x: Fraction
    level_len: Fraction
    y: Fraction | None = None
    k: int | None = None
    j: int | None = None

    @property
    def q(self) -> int | None:
        """6 p_{n-1}**2 + 1 (None at stage 0)."""
        return None if self.k is None else (self.p - self.j) // self.k


def stage_parameters(primes) -> list[StageParams]:
    """x_n, y_n, k_n, j_n, l_n for every stage the primes determine."""
    p0 = primes[0]
    out = [StageParams(0, p0, 2 * p0 * p0, Fraction(2 * p0 * p0), Fraction(1))]
    for n in range(1, len(primes)):
        prev = out[-1]
        p = primes[n]
        q = 6 * prev.p ** 2 + 1
        k, j = divmod(p, q)
        if k < 1:
            raise PrimeSequenceError("ratio condition fails", n)
        y = prev.x + prev.level_len / 3
        x = y + j * prev.level_len / (3 * k)
        ell = prev.level_len / (6 * k * p)
        out.append(StageParams(n, p, 2 * p * p, x, ell, y, k, j))
    return out


@dataclass(frozen=True)
class GrowthAssumption:
    """Future primes satisfy p_{m+1} >= p_m**gamma / C (Gamma_0-type growth).

    The finite prefix cannot certify this; it is recorded wherever it is used.
    """

    gamma: int = 3
    C: Fraction = Fraction(1)

    @classmethod
    def from_prefix(cls, primes, gamma: int = 3) -> "GrowthAssumption | None":
        if len(primes) < 2:
            return None
        C = max(Fraction(a ** gamma, b) for a, b in zip(primes, primes[1:]))
        return cls(gamma, max(C, Fraction(1, 10 ** 9)))

    def to_json(self):
        return {"gamma": self.gamma, "C": str(self.C)}


def _round_up_dyadic(q: Fraction, bits: int = 96) -> Fraction:
    return Fraction(-((-q.numerator << bits) // q.denominator), 1 << bits)


def growth_factor_upper(p_last: int, assumption: GrowthAssumption) -> Fraction:
    """Upper bound U with lim x_m <= x_last * U when future primes obey the assumption.

    x_{m+1}/x_m = (1 + 1/(6 p_m**2)) (1 + j/(q k)) <= (1 + 1/(6 p_m**2)) (1 + 1/k_{m+1}),
    and k_{m+1} >= max(1, floor(P**gamma / (C q))) for the smallest admissible p_m = P.
    """
    P = Fraction(p_last)
    prod = Fraction(1)
    tiny = Fraction(1, 2 ** 200)
    for _ in range(64):
        q = 6 * P * P + 1
        K = max(1, math.floor(P ** assumption.gamma / (assumption.C * q)))
        e = (1 + 1 / (6 * P * P)) * (1 + Fraction(1, K)) - 1
        prod = _round_up_dyadic(prod * (1 + e))
        P = max(q + 1, Fraction(math.ceil(P ** assumption.gamma / assumption.C)))
        if e < tiny:
            # later terms shrink at least geometrically with ratio < 1/2
            return _round_up_dyadic(prod / (1 - 2 * e))
    raise ArithmeticError("growth assumption too weak for a finite bound")


# ------------------------------------------------------------------ system


@dataclass(frozen=True)
class AlignedSet:
    """A union of levels of stage `stage` (indices counted from the bottom)."""

    stage: int
    indices: frozenset

    @classmethod
    def unit(cls) -> "AlignedSet":
        """[0, 1): the bottom level of stage 0."""
        return cls(0, frozenset({0}))

    def describe(self) -> str:
        if self == AlignedSet.unit():
            return "unit"
        return f"levels:m={self.stage},idx=" + "+".join(str(i) for i in sorted(self.indices))


class RankOneSystem:
    def __init__(self, primes: PrimeSeq, stages: int, *, partial: bool = False,
                 assumption: GrowthAssumption | None | str = "prefix",
                 level_budget: int = DEFAULT_LEVEL_BUDGET,
                 memory_budget_symbols: int = DEFAULT_MEMORY_BUDGET_SYMBOLS):
        self.primes = primes
        self.params = stage_parameters(primes.primes)
        self.n_stages = stages
        self.partial = partial
        if assumption == "prefix":
            assumption = GrowthAssumption.from_prefix(primes.primes)
        self.assumption: GrowthAssumption | None = assumption
        self.level_budget = level_budget
        self.memory_budget_symbols = memory_budget_symbols
        self._levels: dict[int, np.ndarray] = {}

    def __repr__(self):
        return f"RankOneSystem(primes={list(self.primes.primes)}, stages={self.n_stages})"

    @property
    def stages(self) -> list[StageParams]:
        return self.params[: self.n_stages]

    def stage(self, n: int) -> StageParams:
        if not 0 <= n < self.n_stages:
            raise IndexError(f"stage {n} not built (built: {self.n_stages})")
        return self.params[n]

    @property
    def last(self) -> StageParams:
        """Last stage the known primes determine (not necessarily built)."""
        return self.params[-1]

    # levels ---------------------------------------------------------------
    def levels(self, n: int) -> np.ndarray:
        """Left endpoints of the levels of tower n, bottom to top, in units of l_n."""
        self.stage(n)
        if n in self._levels:
            return self._levels[n]
        if self.params[n].height > self.level_budget:
            raise MemoryError(f"stage {n} has {self.params[n].height} levels, above the level budget")
        if n == 0:
            lv = np.arange(self.params[0].height, dtype=np.int64)
        else:
            lv = self._grow(self.levels(n - 1), self.params[n - 1], self.params[n])
        self._levels[n] = lv
        return lv

    @staticmethod
    def _grow(old: np.ndarray, prev: StageParams, cur: StageParams) -> np.ndarray:
        k, j, p = cur.k, cur.j, cur.p
        s = 6 * k * p  # l_{n-1} / l_n
        w = 2 * k * p  # one third of an old level
        base = old * s
        spacer = np.array([prev.height * s], dtype=np.int64)  # [x_{n-1}, y_n)
        # Step 2: three columns, spacer on top of the middle one
        t2 = np.concatenate([base, base + w, spacer, base + 2 * w])
        # Step 3: k columns of width 2p stacked left to right; Step 4: j spacer pieces on top
        y_units = prev.height * s + w
        rho = np.concatenate([t2 + c * 2 * p for c in range(k)] +
                             [y_units + 2 * p * np.arange(j, dtype=np.int64)])
        # Step 5: p columns of width 2; Step 6: 2 columns of width 1
        sigma = np.concatenate([rho + 2 * c for c in range(p)])
        return np.concatenate([sigma, sigma + 1])

    def level_intervals(self, n: int, idx) -> IntervalSet:
        lv = self.levels(n)
        ell = self.params[n].level_len
        return canonicalize((int(lv[i]) * ell, (int(lv[i]) + 1) * ell) for i in idx)

    # maps -----------------------------------------------------------------
    def stage_map(self, n: int) -> PiecewiseTranslation:
        """T on [0, x_n) minus the top level: each level moves onto the next one."""
        st = self.stage(n)
        if st.height > STAGE_MAP_PIECE_LIMIT:
            raise MemoryError("use check_stage_integer for stages this tall")
        lv = self.levels(n)
        ell = st.level_len
        offs = np.diff(lv)
        return PiecewiseTranslation(
            ((int(a) * ell, (int(a) + 1) * ell, int(o) * ell) for a, o in zip(lv[:-1], offs)))

    def check_stage_integer(self, n: int) -> dict:
        """Exact checks on integer level arrays: tiling, measure, extension of stage n-1."""
        st = self.stage(n)
        lv = self.levels(n)
        # a permutation of the cells 0..height-1: in range and each hit once
        hit = np.zeros(st.height, dtype=np.bool_)
        inside = bool(lv.size == st.height and lv.min() >= 0 and lv.max() < st.height)
        if inside:
            hit[lv] = True
        tiles = inside and bool(hit.all())
        del hit
        out = {"n": n, "tiles_tower": tiles, "measure_is_x": st.height * st.level_len == st.x,
               "top_level_left": Fraction(int(lv[-1])) * st.level_len}
        if n == 0:
            out["extends_previous"] = True
            return out
        prev = self.params[n - 1]
        old = self.levels(n - 1)
        s = 6 * st.k * st.p
        inv = np.empty(prev.height, dtype=np.int64)
        inv[old] = np.arange(prev.height, dtype=np.int64)
        cur = lv[:-1]
        nxt_off = np.diff(lv)
        in_old = cur < prev.height * s
        j_old = inv[cur[in_old] // s]
        defined = j_old < prev.height - 1
        old_off = (old[np.minimum(j_old + 1, prev.height - 1)] - old[j_old]) * s
        out["extends_previous"] = bool(np.all(nxt_off[in_old][defined] == old_off[defined]))
        # every point of the old domain is covered by a new level below the new top
        covered = np.bincount(j_old[defined], minlength=prev.height)
        out["old_domain_covered"] = bool(np.all(covered[:-1] == s)) if prev.height > 1 else True
        return out

    # measure -----------------------------------------------------------------
    def tail_bound(self, n: int, assumption: GrowthAssumption | None | str = "system") -> CertifiedValue:
        """Certified Lebesgue measure of J minus [0, x_n).

        Known primes contribute x_last - x_n exactly; the unknown future needs a growth
        assumption, without which the upper end is +inf.
        """
        if n < 0 or n >= len(self.params):
            raise IndexError("stage outside the known primes")
        if assumption == "system":
            assumption = self.assumption
        x_last = self.last.x
        known = x_last - self.params[n].x
        if assumption is None:
            return CertifiedValue(known, INF)
        U = growth_factor_upper(self.last.p, assumption)
        return CertifiedValue(known, x_last * U - self.params[n].x)

    def normalizer(self, assumption="system") -> CertifiedValue:
        """Certified total Lebesgue measure L of J = lim x_n."""
        t = self.tail_bound(len(self.params) - 1, assumption)
        x = self.last.x
        return CertifiedValue(x + t.lower, x + t.upper if t.bounded else INF)

    def stage_relative_normalizer(self, M: int) -> CertifiedValue:
        return CertifiedValue.exact(self.params[M].x)

    # words -------------------------------------------------------------------
    def plan(self, E: AlignedSet) -> SubstitutionPlan:
        m = E.stage
        self.stage(m)
        h = self.params[m].height
        if any(not 0 <= i < h for i in E.indices):
            raise ValueError("level index outside the tower")
        W = np.zeros(h, dtype=np.uint8)
        W[list(E.indices)] = 1
        stages = [(st.k, st.j, st.p) for st in self.params[m + 1:]]
        return SubstitutionPlan(W, m, stages, self.memory_budget_symbols)

    def base_word(self, n: int, E: AlignedSet):
        """01-name of the base of tower n relative to E (a plan above the memory budget)."""
        if not isinstance(E, AlignedSet):
            raise TypeError("base_word needs a tower-aligned set; use the geometric path otherwise")
        if n < E.stage:
            raise ValueError("E is aligned to a later stage than n")
        pl = self.plan(E)
        return pl.word(n) if pl.fits(n) else pl

    def tower_mask(self, M: int) -> np.ndarray:
        """1 at positions of U_M (the repeating block of W_M) lying in tower M-1, 0 on spacers."""
        st = self.params[M]
        h = self.params[M - 1].height
        one = np.ones(h, dtype=np.uint8)
        unit = np.concatenate([one, one, np.zeros(1, np.uint8), one])
        return np.concatenate([np.tile(unit, st.k), np.zeros(st.j, np.uint8)])

    def E_intervals(self, E: AlignedSet) -> IntervalSet:
        return self.level_intervals(E.stage, sorted(E.indices))

    def E_measure(self, E: AlignedSet) -> Fraction:
        return len(E.indices) * self.params[E.stage].level_len

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        stages = []
        for st in self.stages:
            stages.append({"n": st.n, "x": str(st.x), "y": None if st.y is None else str(st.y),
                           "k": st.k, "j": st.j, "height": st.height, "level_len": str(st.level_len)})
        if len(self.params) > 0:
            t = self.tail_bound(self.n_stages - 1) if self.n_stages else None
        tail_upper = str(t.upper) if t is not None and t.bounded else None
        out = {"primes": list(self.primes.primes), "stages": stages, "tail_upper": tail_upper}
        out["assumption"] = self.assumption.to_json() if self.assumption else None
        out["partial"] = self.partial
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RankOneSystem":
        primes = validate_primes(data["primes"])
        a = data.get("assumption", "prefix")
        if isinstance(a, dict):
            a = GrowthAssumption(int(a["gamma"]), Fraction(a["C"]))
        sys_ = cls(primes, len(data["stages"]), partial=bool(data.get("partial", False)), assumption=a)
        for st in data["stages"]:
            ref = sys_.params[st["n"]]
            if Fraction(st["x"]) != ref.x or st["height"] != ref.height or Fraction(st["level_len"]) != ref.level_len:
                raise ValueError(f"stage {st['n']} in the file disagrees with the primes")
        return sys_


def build(seq, stages: int | None = None, **kw) -> RankOneSystem:
    """Build stages 0..stages-1; asking for more stages than primes gives a flagged partial system."""
    ps = seq if isinstance(seq, PrimeSeq) else validate_primes(seq)
    if stages is None:
        stages = len(ps)
    partial = stages > len(ps)
    return RankOneSystem(ps, min(stages, len(ps)), partial=partial, **kw)
