"""Name partitions P_n and certified entropies H(g, P_n) for rank-one systems and subshifts."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .certified import INF, CertifiedValue, as_fraction, log2_bounds, mul_down, mul_up, sum_down, sum_up
from .entropy_functions import EntropyFunction, jensen_bound_upper
from .geometry import IntervalSet, LabeledPartition, difference, intersect
from .rank_one import AlignedSet, RankOneSystem
from .words import NameMultiset, census_periodic

# Above this many symbols per name, 2**k atoms are handled through log2 only.
_EXACT_COUNT_BITS = 900


# ----------------------------------------------------------- geometric path


@dataclass
class GeometricJoin:
    """P_n on the part of [0, x_M) where the first n-1 steps of the stage map are defined."""

    n: int
    partition: LabeledPartition
    uncovered: IntervalSet
    stage: int


def _E_set(sys: RankOneSystem, E) -> IntervalSet:
    return sys.E_intervals(E) if isinstance(E, AlignedSet) else E


def join_sequence_geometric(sys: RankOneSystem, E, n_max: int, M: int) -> list[GeometricJoin]:
    """P_1, ..., P_{n_max} built by pulling atoms back through the stage-M map.

    Labels read s_0 s_1 ... s_{n-1} with s_i = 1 when T^i x lies in E.
    """
    st = sys.stage(M)
    if n_max >= st.height:
        raise ValueError(f"n_max={n_max} needs a taller tower than stage {M} (height {st.height})")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    T = sys.stage_map(M)
    amb = IntervalSet.interval(0, st.x)
    E1 = intersect(_E_set(sys, E), amb)
    E0 = difference(amb, E1)
    atoms = [("1", E1), ("0", E0)]
    covered = amb
    out = [GeometricJoin(1, LabeledPartition(atoms, amb, check=False), IntervalSet.empty(), M)]
    for n in range(2, n_max + 1):
        new = []
        for lab, A in atoms:
            pre, _ = T.preimage(A)
            if not pre:
                continue
            for b, Eb in (("1", E1), ("0", E0)):
                s = intersect(pre, Eb)
                if s:
                    new.append((b + lab, s))
        atoms = new
        covered, _ = T.preimage(covered)
        out.append(GeometricJoin(n, LabeledPartition(atoms, covered, check=False), difference(amb, covered), M))
    return out


def partition_names(P: LabeledPartition, normalizer, k: int | None = None) -> NameMultiset:
    """Atoms of a (possibly partial) partition as a NameMultiset with unit cell."""
    ent = {lab: s.measure for lab, s in P.atoms}
    if k is None:
        k = max((len(l) for l in ent), default=1)
    nz = normalizer if isinstance(normalizer, CertifiedValue) else CertifiedValue.exact(normalizer)
    # labels need not be k-bit words (plain partitions), so allow at least one atom per label
    return NameMultiset.from_entries(k, ent, Fraction(1), nz, max_atoms=max(2 ** k, len(ent)),
                                     covered=P.ambient.measure, path="geometric")


# ------------------------------------------------------------ symbolic path


def default_stage(sys: RankOneSystem, k: int, at_least: int = 0) -> int:
    """Smallest built stage M >= at_least whose tower has at least 4k levels (else the tallest)."""
    for st in sys.stages[at_least:]:
        if st.height >= 4 * k:
            return st.n
    return sys.n_stages - 1


def name_measures_symbolic(sys: RankOneSystem, n: int, E: AlignedSet, k: int, *, workers: int = 1,
                           short_period: int | None = None, masked: bool = False,
                           chain_step: int | None = None, exact: bool | None = None,
                           normalizer: CertifiedValue | None = None) -> NameMultiset:
    """k-names read off W_n: every window of W_n carries one level of tower n (measure l_n).

    W_n = U_n**(2 p_n), so windows are counted through the residues of U_n.
    masked: restrict the short-period weight to windows starting in tower n-1.
    """
    st = sys.stage(n)
    if not 1 <= k <= st.height:
        raise ValueError(f"k={k} exceeds the {st.height} symbols of W_{n}")
    plan = sys.plan(E)
    if n == plan.base_stage:
        U, reps = plan.base, 1
    else:
        U, reps = plan.block(n), plan.block_reps(n)
    mask = sys.tower_mask(n) if masked and n > plan.base_stage else None
    if chain_step is None and n > plan.base_stage:
        # windows one U_{n-1} apart coincide inside runs of W_{n-1} copies
        chain_step = sys.params[n - 1].p
    cen = census_periodic(U, reps, k, short_period=short_period, mask=mask, chain_step=chain_step,
                          workers=workers, exact=exact)
    L = sys.normalizer() if normalizer is None else normalizer
    covered = cen.covered_positions
    meta = {"path": "symbolic", "stage": n, "E": E.describe(), "exact": cen.exact,
            "windows": cen.windows, "block_len": cen.period_len, "reps": reps}
    entries = None
    if cen.classes is not None:
        entries = {w: wt for w, wt, _ in cen.classes}
    return NameMultiset(k, st.level_len, L, covered, entries, cen.lower_hist, cen.upper_hist,
                        max_atoms=2 ** k if k <= _EXACT_COUNT_BITS else None,
                        flagged_weight=cen.flagged_weight, flag_threshold=cen.flag_threshold, meta=meta)


# --------------------------------------------------------- certified entropy


def _lower_masses(names: NameMultiset, w) -> Fraction:
    L = names.normalizer
    if not L.bounded:
        return Fraction(0)
    return as_fraction(w) * names.cell / as_fraction(L.upper)


def _upper_mass(names: NameMultiset, w) -> Fraction:
    return min(as_fraction(w) * names.cell / as_fraction(names.normalizer.lower), Fraction(1))


def entropy_lower(g: EntropyFunction, names: NameMultiset) -> Fraction | float:
    res_hi = as_fraction(names.residual.upper)
    terms = []
    for w, mult in names.lower_hist.items():
        a = _lower_masses(names, w)
        b = min(_upper_mass(names, w) + res_hi, Fraction(1))
        lo = g.bounds(a)[0] if a == b else g.bounds_on(a, b)[0]
        terms.append(mul_down(mult, lo))
    if res_hi > 0:
        # unseen atoms: sum g >= g(total) >= min(g(0), g(res_hi)) by subadditivity and concavity
        terms.append(min(Fraction(0), g.bounds(res_hi)[0]))
    return sum_down(terms)


def _level_term_upper(g: EntropyFunction, mass: Fraction, cnt, log2_cnt_hi: float | None):
    """Upper bound of cnt * g(mass / cnt) = mass * F(log2 cnt - log2 mass)."""
    if mass == 0:
        return Fraction(0)
    if log2_cnt_hi is None:
        if cnt == 0:
            return INF
        t = mass / cnt
        return mul_up(cnt, g.bounds(min(t, Fraction(1)))[1])
    lo_m, _ = log2_bounds(mass)
    y = max(log2_cnt_hi - lo_m, 0.0)
    y = math.nextafter(y, INF)
    return mul_up(mass, g.F_bounds(y, y)[1])


def entropy_upper(g: EntropyFunction, names: NameMultiset) -> Fraction | float:
    """Water-filling bound: seen atoms have mass >= their lower mass, the free mass goes anywhere.

    The maximum of sum g(x_i) under x_i >= a_i, sum x_i = 1, over at most 2**k atoms, raises the
    smallest atoms to a common level t. The unseen-atom count uses the coarse (lower) histogram,
    which never exceeds the true number of atoms that meet the covered part.
    """
    k = names.k
    F = as_fraction(names.residual.upper)
    groups = sorted(((_lower_masses(names, w), m) for w, m in names.upper_hist.items()), key=lambda t: t[0])
    seen_coarse = sum(names.lower_hist.values())
    big = k > _EXACT_COUNT_BITS
    if big:
        Z = None
        log2_N = float(k)
    else:
        N = names.max_atoms if names.max_atoms is not None else 2 ** k
        Z = max(N - seen_coarse, 0)

    def value(j: int):
        mass = F + sum((a * m for a, m in groups[:j]), Fraction(0))
        rest = [mul_up(m, g.bounds(a)[1]) for a, m in groups[j:]]
        if big:
            # cnt = Z + raised <= 2**k + raised
            raised = sum(m for _, m in groups[:j])
            lc = math.nextafter(log2_N, INF) if raised <= seen_coarse else log2_N + 1
            head = _level_term_upper(g, mass, None, lc)
        else:
            cnt = Z + sum(m for _, m in groups[:j])
            head = _level_term_upper(g, mass, cnt, None)
        return sum_up([head] + rest)

    # water level with exact rationals: stop at the first group lying above the raised level
    j = 0
    if big:
        # about 2**k free atoms put the level near F * 2**-k, far below every seen mass
        if groups and F > 0:
            lvl = log2_bounds(F)[1] - log2_N
            a0 = groups[0][0]
            if a0 == 0 or lvl + 1 >= log2_bounds(a0)[0]:
                raise ArithmeticError("water level not separated from the seen masses")
    else:
        mass, cnt = F, Z
        while j < len(groups):
            a, m = groups[j]
            if (cnt > 0 and mass / cnt <= a) or (cnt == 0 and mass == 0):
                break
            mass += a * m
            cnt += m
            j += 1
    best = value(j)
    cap = g.F_bounds(float(k), float(k))[1] if big else jensen_bound_upper(g, N)
    return best if float(best) <= float(cap) else cap


def entropy_of_names(g: EntropyFunction, names: NameMultiset) -> CertifiedValue:
    lo, hi = entropy_lower(g, names), entropy_upper(g, names)
    if float(lo) > float(hi):
        # only possible through float slack at exact equality; keep the enclosure valid
        lo = hi if not isinstance(hi, float) else math.nextafter(hi, -INF)
    return CertifiedValue(lo, hi)


# ----------------------------------------------------------------- series


@dataclass
class EntropySeries:
    entries: list = field(default_factory=list)  # (n, CertifiedValue)
    residuals: list = field(default_factory=list)  # residual upper per entry
    max_atoms: list = field(default_factory=list)  # largest atom (upper), a diagnostic
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def values(self) -> dict:
        return dict(self.entries)

    def monotone_violations(self) -> list[int]:
        """Indices n where H_n.upper < H_{n-1}.lower (refinement monotonicity broken)."""
        bad = []
        for (n0, a), (n1, b) in zip(self.entries, self.entries[1:]):
            if float(b.upper) < float(a.lower):
                bad.append(n1)
        return bad

    def rows(self):
        method = self.meta.get("method", "")
        for (n, H), r in zip(self.entries, self.residuals):
            yield {"n": n, "H_lower": H.lower, "H_upper": H.upper, "method": method, "residual_upper": r}


def entropy_series(g: EntropyFunction, sources, *, ns=None, normalizer=None, **meta) -> EntropySeries:
    """H(g, P_n) for each source: a NameMultiset, a GeometricJoin, or a LabeledPartition."""
    out = EntropySeries(meta={"g": g.spec(), **meta})
    methods = set()
    for i, src in enumerate(sources):
        if isinstance(src, GeometricJoin):
            if normalizer is None:
                raise ValueError("geometric sources need the system normalizer")
            names = partition_names(src.partition, normalizer, src.n)
            n = src.n
            methods.add("geometric")
        elif isinstance(src, LabeledPartition):
            names = partition_names(src, normalizer if normalizer is not None else src.ambient.measure)
            n = ns[i] if ns else i + 1
            methods.add("partition")
        else:
            names = src
            n = ns[i] if ns else src.k
            methods.add(str(src.meta.get("path", "symbolic")))
        H = entropy_of_names(g, names)
        out.entries.append((n, H))
        out.residuals.append(names.residual.upper)
        out.max_atoms.append(names.max_atom().upper if names.upper_hist else Fraction(0))
    out.meta.setdefault("method", "+".join(sorted(methods)))
    return out


# ---------------------------------------------------------------- subshifts


@dataclass(frozen=True)
class SubshiftSpec:
    """Reference subshifts on {0,1}: Bernoulli full shift, SFT, or Markov chain."""

    kind: str  # FullShift, SFT, Markov
    p: Fraction = Fraction(1, 2)  # probability of symbol 1 (FullShift)
    forbidden: tuple = ()
    matrix: tuple | None = None  # row-stochastic, matrix[a][b] = P(b | a)
    stationary: tuple | None = None

    def __post_init__(self):
        if self.kind == "FullShift":
            p = as_fraction(self.p)
            object.__setattr__(self, "p", p)
            if not 0 <= p <= 1:
                raise ValueError("Bernoulli parameter must lie in [0,1]")
        elif self.kind == "SFT":
            fw = tuple(str(w) for w in self.forbidden)
            if any(not w or set(w) - {"0", "1"} for w in fw):
                raise ValueError("forbidden words must be nonempty binary strings")
            object.__setattr__(self, "forbidden", fw)
        elif self.kind == "Markov":
            P = tuple(tuple(as_fraction(v) for v in row) for row in self.matrix)
            pi = tuple(as_fraction(v) for v in self.stationary)
            if len(P) != 2 or any(len(r) != 2 for r in P) or len(pi) != 2:
                raise ValueError("Markov data must be 2x2 with a length-2 stationary vector")
            if any(v < 0 for r in P for v in r) or any(sum(r) != 1 for r in P):
                raise ValueError("matrix rows must be probability vectors")
            if any(v < 0 for v in pi) or sum(pi) != 1:
                raise ValueError("stationary vector must be a probability vector")
            if any(sum(pi[a] * P[a][b] for a in range(2)) != pi[b] for b in range(2)):
                raise ValueError("stationary vector is not fixed by the matrix")
            object.__setattr__(self, "matrix", P)
            object.__setattr__(self, "stationary", pi)
        else:
            raise ValueError(f"unknown subshift kind {self.kind!r}")

    @classmethod
    def full_shift(cls, p=Fraction(1, 2)):
        return cls("FullShift", p=p)

    @classmethod
    def sft(cls, forbidden):
        return cls("SFT", forbidden=tuple(forbidden))

    @classmethod
    def markov(cls, matrix, stationary):
        return cls("Markov", matrix=tuple(map(tuple, matrix)), stationary=tuple(stationary))

    def forbidden_words(self) -> tuple:
        if self.kind == "SFT":
            return self.forbidden
        if self.kind == "Markov":
            fw = [str(a) for a in range(2) if self.stationary[a] == 0]
            fw += [f"{a}{b}" for a in range(2) for b in range(2) if self.matrix[a][b] == 0]
            return tuple(fw)
        fw = []
        if self.p == 0:
            fw.append("1")
        if self.p == 1:
            fw.append("0")
        return tuple(fw)


def subshift_complexity(spec: SubshiftSpec, n: int) -> int:
    """Number of admissible words of length n (dynamic programming over suffix states)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    fw = spec.forbidden_words()
    if not fw:
        return 2 ** n
    memory = max(len(w) for w in fw) - 1
    states = {"": 1}
    for _ in range(n):
        nxt: dict = {}
        for s, c in states.items():
            for b in "01":
                t = s + b
                if any(t.endswith(w) for w in fw):
                    continue
                key = t[-memory:] if memory else ""
                nxt[key] = nxt.get(key, 0) + c
        states = nxt
    return sum(states.values())


def cylinder_measures(spec: SubshiftSpec, n: int, *, explicit_limit: int = 16) -> NameMultiset:
    """Exact cylinder measures of length-n words (Bernoulli or Markov)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    one = CertifiedValue.exact(1)
    if spec.kind == "FullShift":
        p, q = spec.p, 1 - spec.p
        hist: dict = {}
        for j in range(n + 1):
            w = p ** j * q ** (n - j)
            if w:
                hist[w] = hist.get(w, 0) + comb(n, j)
        entries = None
        if n <= explicit_limit:
            entries = {}
            for bits in itertools.product("01", repeat=n):
                s = "".join(bits)
                w = p ** s.count("1") * q ** s.count("0")
                if w:
                    entries[s] = w
        return NameMultiset(n, Fraction(1), one, Fraction(1), entries, hist, dict(hist), 2 ** n,
                            meta={"path": "subshift", "kind": "FullShift"})
    if spec.kind == "Markov":
        if n > 22:
            raise ValueError("Markov cylinders are enumerated explicitly; n <= 22")
        P, pi = spec.matrix, spec.stationary
        entries = {}
        probs = {"0": pi[0], "1": pi[1]}
        for _ in range(n - 1):
            probs = {s + b: v * P[int(s[-1])][int(b)] for s, v in probs.items() for b in "01"}
            probs = {s: v for s, v in probs.items() if v}
        entries = {s: v for s, v in probs.items() if v}
        return NameMultiset.from_entries(n, entries, Fraction(1), one, covered=Fraction(1),
                                         path="subshift", kind="Markov")
    raise ValueError("cylinder measures need a measure (FullShift or Markov)")


def geometric_names(sys: RankOneSystem, E, k: int, M: int | None = None) -> NameMultiset:
    """The geometric P_k as a NameMultiset, for comparison with the symbolic path."""
    if M is None:
        M = default_stage(sys, k)
    joins = join_sequence_geometric(sys, E, k, M)
    return partition_names(joins[-1].partition, sys.normalizer(), k)


__all__ = [
    "GeometricJoin", "join_sequence_geometric", "partition_names", "default_stage",
    "name_measures_symbolic", "entropy_lower", "entropy_upper", "entropy_of_names",
    "EntropySeries", "entropy_series", "SubshiftSpec", "subshift_complexity",
    "cylinder_measures", "geometric_names",
]
