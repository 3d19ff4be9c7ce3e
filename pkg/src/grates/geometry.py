"""Exact rational interval sets, labeled partitions, piecewise translations, static g-entropy."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .certified import CertifiedValue, as_fraction, sum_down, sum_up
from .entropy_functions import EntropyFunction


def _q(x) -> Fraction:
    return as_fraction(x)


class IntervalSet:
    """Finite union of half-open rational intervals [a, b), kept sorted and merged."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple] = (), *, _canonical: bool = False):
        if _canonical:
            self.intervals = tuple(intervals)
        else:
            self.intervals = canonicalize(intervals).intervals

    @classmethod
    def interval(cls, a, b) -> "IntervalSet":
        return cls([(a, b)])

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls((), _canonical=True)

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def __bool__(self):
        return bool(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        body = ", ".join(f"[{a},{b})" for a, b in self.intervals)
        return f"IntervalSet({body})"

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return union(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def contains_point(self, x) -> bool:
        i = bisect.bisect_right(self.intervals, (x, float("inf"))) - 1
        return i >= 0 and self.intervals[i][0] <= x < self.intervals[i][1]

    def shift(self, offset) -> "IntervalSet":
        return IntervalSet(((a + offset, b + offset) for a, b in self.intervals), _canonical=True)

    def to_json(self):
        return [[str(a), str(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data):
        return cls((Fraction(a), Fraction(b)) for a, b in data)


def canonicalize(raw: Iterable[tuple]) -> IntervalSet:
    """Sort and merge overlapping or adjacent half-open intervals."""
    items = []
    for a, b in raw:
        a, b = _q(a), _q(b)
        if not a < b:
            raise ValueError(f"interval [{a},{b}) is empty or reversed")
        items.append((a, b))
    items.sort()
    out: list[tuple] = []
    for a, b in items:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return IntervalSet(out, _canonical=True)


def intersect(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    out = []
    i = j = 0
    X, Y = A.intervals, B.intervals
    while i < len(X) and j < len(Y):
        a = max(X[i][0], Y[j][0])
        b = min(X[i][1], Y[j][1])
        if a < b:
            out.append((a, b))
        if X[i][1] < Y[j][1]:
            i += 1
        else:
            j += 1
    return IntervalSet(out, _canonical=True)


def union(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    return canonicalize(list(A.intervals) + list(B.intervals)) if (A or B) else IntervalSet.empty()


def difference(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    out = []
    Y = B.intervals
    j = 0
    for a, b in A.intervals:
        cur = a
        while j < len(Y) and Y[j][1] <= cur:
            j += 1
        k = j
        while k < len(Y) and Y[k][0] < b:
            if Y[k][0] > cur:
                out.append((cur, Y[k][0]))
            cur = max(cur, Y[k][1])
            if cur >= b:
                break
            k += 1
        if cur < b:
            out.append((cur, b))
    return IntervalSet(out, _canonical=True)


def complement(A: IntervalSet, ambient: tuple) -> IntervalSet:
    amb = IntervalSet.interval(*ambient)
    if difference(A, amb):
        raise ValueError("set is not contained in the ambient interval")
    return difference(amb, A)


def set_algebra(op: str, A: IntervalSet, B: IntervalSet | None = None, ambient: tuple | None = None) -> IntervalSet:
    if op == "Intersect":
        return intersect(A, B)
    if op == "Union":
        return union(A, B)
    if op == "Diff":
        return difference(A, B)
    if op == "Complement":
        return complement(A, ambient)
    raise ValueError(f"unknown set operation {op!r}")


# ------------------------------------------------------------------ partitions


class LabeledPartition:
    """Atoms (label, IntervalSet), pairwise disjoint, covering the ambient set exactly."""

    def __init__(self, atoms: Sequence[tuple], ambient, *, check: bool = True):
        if isinstance(ambient, tuple):
            ambient = IntervalSet.interval(*ambient)
        self.ambient: IntervalSet = ambient
        self.atoms = [(lab, s) for lab, s in atoms if s]
        if check:
            total = sum((s.measure for _, s in self.atoms), Fraction(0))
            cover = canonicalize([iv for _, s in self.atoms for iv in s]) if self.atoms else IntervalSet.empty()
            if total != ambient.measure or cover != ambient:
                raise ValueError("atoms must be disjoint and cover the ambient set")

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def labels(self):
        return [lab for lab, _ in self.atoms]

    def measures(self) -> dict:
        return {lab: s.measure for lab, s in self.atoms}

    def __repr__(self):
        return f"LabeledPartition({len(self.atoms)} atoms, ambient measure {self.ambient.measure})"

    @classmethod
    def from_cuts(cls, cuts: Sequence, labels: Sequence | None = None) -> "LabeledPartition":
        """Partition of [cuts[0], cuts[-1]) into consecutive pieces; equal labels merge."""
        cuts = [_q(c) for c in cuts]
        labels = labels if labels is not None else [str(i) for i in range(len(cuts) - 1)]
        groups: dict = {}
        for lab, a, b in zip(labels, cuts, cuts[1:]):
            groups.setdefault(lab, []).append((a, b))
        atoms = [(lab, canonicalize(ivs)) for lab, ivs in groups.items()]
        return cls(atoms, (cuts[0], cuts[-1]))

    @classmethod
    def binary(cls, E: IntervalSet, ambient) -> "LabeledPartition":
        amb = IntervalSet.interval(*ambient) if isinstance(ambient, tuple) else ambient
        E = intersect(E, amb)
        return cls([("1", E), ("0", difference(amb, E))], amb)


def join(P: LabeledPartition, Q: LabeledPartition) -> LabeledPartition:
    if P.ambient != Q.ambient:
        raise ValueError("join needs partitions of the same ambient set")
    atoms = []
    for lp, sp in P.atoms:
        for lq, sq in Q.atoms:
            s = intersect(sp, sq)
            if s:
                atoms.append((f"{lp}{lq}" if isinstance(lp, str) and isinstance(lq, str) else (lp, lq), s))
    return LabeledPartition(atoms, P.ambient, check=False)


# ------------------------------------------------------------ translations


@dataclass(frozen=True)
class Piece:
    a: Fraction
    b: Fraction
    offset: Fraction


class PiecewiseTranslation:
    """x -> x + offset on each source interval; sources and images pairwise disjoint."""

    def __init__(self, pieces: Iterable[tuple], *, validate: bool = True):
        raw = sorted((_q(a), _q(b), _q(o)) for a, b, o in pieces)
        merged: list[list] = []
        for a, b, o in raw:
            if not a < b:
                raise ValueError("empty source interval")
            if merged and merged[-1][1] == a and merged[-1][2] == o:
                merged[-1][1] = b
            else:
                merged.append([a, b, o])
        self.pieces = tuple(Piece(a, b, o) for a, b, o in merged)
        self._starts = [p.a for p in self.pieces]
        by_image = sorted(self.pieces, key=lambda p: p.a + p.offset)
        self._img = by_image
        self._img_starts = [p.a + p.offset for p in by_image]
        if validate:
            for p, r in zip(self.pieces, self.pieces[1:]):
                if r.a < p.b:
                    raise ValueError("source intervals overlap")
            for p, r in zip(by_image, by_image[1:]):
                if r.a + r.offset < p.b + p.offset:
                    raise ValueError("image intervals overlap")

    def __len__(self):
        return len(self.pieces)

    @property
    def domain(self) -> IntervalSet:
        return canonicalize((p.a, p.b) for p in self.pieces) if self.pieces else IntervalSet.empty()

    @property
    def range(self) -> IntervalSet:
        return canonicalize((p.a + p.offset, p.b + p.offset) for p in self.pieces) if self.pieces else IntervalSet.empty()

    def source_measure(self) -> Fraction:
        return sum((p.b - p.a for p in self.pieces), Fraction(0))

    def image_measure(self) -> Fraction:
        return sum(((p.b + p.offset) - (p.a + p.offset) for p in self.pieces), Fraction(0))

    def __call__(self, x):
        x = _q(x)
        i = bisect.bisect_right(self._starts, x) - 1
        if i >= 0 and self.pieces[i].a <= x < self.pieces[i].b:
            return x + self.pieces[i].offset
        raise ValueError(f"{x} is outside the domain")

    def restricted_to(self, S: IntervalSet) -> "PiecewiseTranslation":
        out = []
        for p in self.pieces:
            for a, b in intersect(IntervalSet([(p.a, p.b)], _canonical=True), S):
                out.append((a, b, p.offset))
        return PiecewiseTranslation(out)

    def agrees_with(self, other: "PiecewiseTranslation") -> bool:
        """True when self extends other: same offset wherever other is defined."""
        for q in other.pieces:
            i = bisect.bisect_right(self._starts, q.a) - 1
            x = q.a
            while x < q.b:
                if i < 0 or i >= len(self.pieces) or not (self.pieces[i].a <= x < self.pieces[i].b):
                    return False
                if self.pieces[i].offset != q.offset:
                    return False
                x = self.pieces[i].b
                i += 1
        return True

    def image(self, S: IntervalSet) -> tuple[IntervalSet, IntervalSet]:
        out = []
        for a, b in S:
            i = max(bisect.bisect_right(self._starts, a) - 1, 0)
            while i < len(self.pieces) and self.pieces[i].a < b:
                p = self.pieces[i]
                lo, hi = max(a, p.a), min(b, p.b)
                if lo < hi:
                    out.append((lo + p.offset, hi + p.offset))
                i += 1
        img = canonicalize(out) if out else IntervalSet.empty()
        return img, difference(S, self.domain)

    def preimage(self, S: IntervalSet) -> tuple[IntervalSet, IntervalSet]:
        out = []
        for a, b in S:
            i = max(bisect.bisect_right(self._img_starts, a) - 1, 0)
            while i < len(self._img) and self._img_starts[i] < b:
                p = self._img[i]
                lo, hi = max(a, p.a + p.offset), min(b, p.b + p.offset)
                if lo < hi:
                    out.append((lo - p.offset, hi - p.offset))
                i += 1
        pre = canonicalize(out) if out else IntervalSet.empty()
        return pre, difference(S, self.range)


def map_set(T: PiecewiseTranslation, S: IntervalSet, direction: str) -> tuple[IntervalSet, IntervalSet]:
    """Image or preimage of S; the second value is the part of S the map cannot reach."""
    if direction == "Image":
        return T.image(S)
    if direction == "Preimage":
        return T.preimage(S)
    raise ValueError(f"unknown direction {direction!r}")


# ------------------------------------------------------------------ entropy


def _normalizer(normalizer) -> CertifiedValue:
    n = normalizer if isinstance(normalizer, CertifiedValue) else CertifiedValue.exact(normalizer)
    if not n.lower > 0:
        raise ValueError("normalizer must be positive")
    return n


def mass_interval(mu: Fraction, normalizer: CertifiedValue) -> tuple:
    if not normalizer.bounded:
        lo = Fraction(0)
    else:
        lo = mu / as_fraction(normalizer.upper)
    hi = mu / as_fraction(normalizer.lower)
    return lo, min(hi, Fraction(1))


def entropy_of_masses(g: EntropyFunction, masses: Iterable[Fraction], normalizer) -> CertifiedValue:
    """Sum of g(mu/N) with N certified; exact when everything is."""
    N = _normalizer(normalizer)
    los, his = [], []
    for mu in masses:
        if mu == 0:
            continue
        a, b = mass_interval(_q(mu), N)
        if a == b:
            lo, hi = g.bounds(a)
        else:
            lo, hi = g.bounds_on(a, b)
        los.append(lo)
        his.append(hi)
    return CertifiedValue(sum_down(los), sum_up(his))


def static_entropy(g: EntropyFunction, P: LabeledPartition, normalizer=None) -> CertifiedValue:
    """H(g, P) = sum over atoms of g(mu(A)/normalizer)."""
    if normalizer is None:
        normalizer = P.ambient.measure
    return entropy_of_masses(g, (s.measure for _, s in P.atoms), normalizer)


def restricted_entropy(g: EntropyFunction, P: LabeledPartition, F: IntervalSet, normalizer=None) -> CertifiedValue:
    """H_F(g, P) = sum over atoms of g(mu(A & F)/normalizer)."""
    if normalizer is None:
        normalizer = P.ambient.measure
    return entropy_of_masses(g, (intersect(s, F).measure for _, s in P.atoms), normalizer)
