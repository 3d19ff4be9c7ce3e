"""Binary words: periods, factor counting, name multisets and substitution plans.

Words are numpy uint8 arrays of 0/1 (ASCII "01" strings are accepted everywhere).
Window censuses over periodic words use numba kernels for rolling hashes and
shifted self-match runs.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numba
import numpy as np

from .certified import CertifiedValue, as_fraction

DEFAULT_MEMORY_BUDGET_SYMBOLS = 2 ** 30
EXACT_COMPARE_BUDGET = 400_000_000  # byte comparisons allowed for verifying hash groups

# two prime moduli below 2**31 and 2**30; keys pack both residues into 61 bits
_M1 = 2147483647
_M2 = 1073741789
_B1 = 1_000_003
_B2 = 786_433


def as_word(w) -> np.ndarray:
    if isinstance(w, np.ndarray):
        return w.astype(np.uint8, copy=False)
    if isinstance(w, (bytes, bytearray)):
        return (np.frombuffer(bytes(w), dtype=np.uint8) - 48).astype(np.uint8)
    if isinstance(w, str):
        arr = np.frombuffer(w.encode("ascii"), dtype=np.uint8) - 48
        if arr.size and arr.max() > 1:
            raise ValueError("words are strings over {0,1}")
        return arr.astype(np.uint8)
    return np.asarray(list(w), dtype=np.uint8)


def word_str(w) -> str:
    a = as_word(w)
    return (a + 48).tobytes().decode("ascii")


# --------------------------------------------------------------------- periods


@numba.njit(cache=True)
def _period_kernel(s):
    n = s.shape[0]
    border = np.zeros(n, dtype=np.int64)
    j = 0
    for i in range(1, n):
        while j > 0 and s[i] != s[j]:
            j = border[j - 1]
        if s[i] == s[j]:
            j += 1
        border[i] = j
    return n - border[n - 1]


def period(s) -> int:
    """Least k >= 1 with s[i] == s[i+k] on the overlap (n when no shorter shift works)."""
    a = as_word(s)
    if a.size == 0:
        raise ValueError("period of the empty word is undefined")
    return int(_period_kernel(a))


def period_bruteforce(s) -> int:
    a = word_str(s)
    n = len(a)
    for k in range(1, n + 1):
        if all(a[i] == a[i + k] for i in range(n - k)):
            return k
    return n


# ------------------------------------------------------------------- kernels


@numba.njit(cache=True, nogil=True)
def _hash_windows(S, k, start, count, pk1, pk2, out, shift_bit, split):
    """Rolling hash of S[r:r+k] for r in [start, start+count) into out[r-start].

    The lowest bit marks r > split (callers use it for the two window weights).
    """
    h1 = 0
    h2 = 0
    for t in range(start, start + k):
        c = S[t] + 1
        h1 = (h1 * _B1 + c) % _M1
        h2 = (h2 * _B2 + c) % _M2
    for i in range(count):
        r = start + i
        key = (np.uint64(h1) << np.uint64(30)) | np.uint64(h2)
        if shift_bit:
            key = (key << np.uint64(1)) | np.uint64(1 if r > split else 0)
        out[i] = key
        if i + 1 < count:
            c_out = S[r] + 1
            c_in = S[r + k] + 1
            h1 = (h1 * _B1 + c_in - (c_out * pk1) % _M1 + _M1) % _M1
            h2 = (h2 * _B2 + c_in - (c_out * pk2) % _M2 + _M2) % _M2


@numba.njit(cache=True, nogil=True)
def _shift_match_flags(S, k, start, count, p, need, flags):
    """flags[i] |= (S[t] == S[t+p] for all t in [r, r+need)), r = start+i."""
    end = start + count - 1 + need  # last t examined is end-1
    run = 0
    t = end - 1
    # run = number of consecutive matches starting at t
    while t >= start:
        if S[t] == S[t + p]:
            run += 1
        else:
            run = 0
        if t < start + count and run >= need:
            flags[t - start] = True
        t -= 1


@numba.njit(cache=True)
def _equal_windows(S, k, i, j):
    for t in range(k):
        if S[i + t] != S[j + t]:
            return False
    return True


@numba.njit(cache=True)
def _group_runs(keys, w_hi, w_lo):
    """Walk sorted keys (hash<<1 | weight bit) and histogram group weights."""
    hist = numba.typed.Dict.empty(numba.types.int64, numba.types.int64)
    n = keys.shape[0]
    i = 0
    while i < n:
        base = keys[i] >> np.uint64(1)
        a = 0
        b = 0
        while i < n and (keys[i] >> np.uint64(1)) == base:
            if keys[i] & np.uint64(1):
                b += 1
            else:
                a += 1
            i += 1
        w = a * w_hi + b * w_lo
        if w in hist:
            hist[w] += 1
        else:
            hist[w] = 1
    return hist


@numba.njit(cache=True)
def _chain_hist(linked, n, d, split, w_hi, w_lo):
    """Histogram of weights of chains r, r+d, r+2d, ... joined where linked[r] is set."""
    hist = numba.typed.Dict.empty(numba.types.int64, numba.types.int64)
    for c in range(min(d, n)):
        r = c
        w = 0
        while r < n:
            w += w_hi if r <= split else w_lo
            if not (linked[r] and r + d < n):
                if w in hist:
                    hist[w] += 1
                else:
                    hist[w] = 1
                w = 0
            r += d
    return hist


@numba.njit(cache=True)
def _masked_weight(flags, mask, n, split, w_hi, w_lo):
    tot = 0
    for r in range(n):
        if flags[r] and mask[r]:
            tot += w_hi if r <= split else w_lo
    return tot


# ---------------------------------------------------------------- counting


def factor_multiset(W, k: int) -> dict[str, int]:
    """Occurrence counts of all length-k factors over the |W|-k+1 windows (exact)."""
    a = as_word(W)
    n = a.size
    if k < 1 or k > n:
        raise ValueError("need 1 <= k <= |W|")
    count = n - k + 1
    if k <= 62:
        # exact integer codes: rolling bit-pack
        codes = np.zeros(count, dtype=np.int64)
        for t in range(k):
            codes = (codes << 1) | a[t:t + count].astype(np.int64)
        uniq, cnt = np.unique(codes, return_counts=True)
        return {format(int(u), f"0{k}b"): int(c) for u, c in zip(uniq, cnt)}
    classes = _exact_window_classes(a, k, 0, count)
    return {word_str(a[r:r + k]): int(c) for r, c in classes}


def _hash_range(S, k, start, count, shift_bit=False, split=-1, workers=1) -> np.ndarray:
    out = np.empty(count, dtype=np.uint64)
    pk1 = pow(_B1, k - 1, _M1) * _B1 % _M1
    pk2 = pow(_B2, k - 1, _M2) * _B2 % _M2
    # rolling removes c_out * B**k because we multiply first, then subtract
    chunks = _chunks(count, workers)

    def job(ch):
        s, c = ch
        _hash_windows(S, k, start + s, c, pk1, pk2, out[s:s + c], shift_bit, split)

    _run(job, chunks, workers)
    return out


def _chunks(count, workers):
    workers = max(1, int(workers))
    size = -(-count // workers)
    return [(s, min(size, count - s)) for s in range(0, count, size)] if count else []


def _run(job, chunks, workers):
    if workers <= 1 or len(chunks) <= 1:
        for ch in chunks:
            job(ch)
        return
    with ThreadPoolExecutor(max_workers=workers) as ex:
        list(ex.map(job, chunks))


def _exact_window_classes(S, k, start, count, workers=1) -> list[tuple[int, int]]:
    """Exact classes of windows S[r:r+k]: list of (representative start, member count)."""
    reps, labels = exact_window_labels(S, k, start, count, workers)
    cnt = np.bincount(labels, minlength=len(reps))
    return [(int(r), int(c)) for r, c in zip(reps, cnt)]


def exact_window_labels(S, k, start, count, workers=1):
    """Class label per window (classes numbered by first occurrence) and representatives."""
    keys = _hash_range(S, k, start, count, workers=workers)
    _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
    inv = inv.reshape(-1)
    # verify every member against its group's representative; split on mismatch
    reps = list((first + start).tolist())
    labels = inv.astype(np.int64).copy()
    rep_of = np.asarray(reps, dtype=np.int64)
    bad = []
    for i in range(count):
        r = start + i
        g = labels[i]
        if rep_of[g] != r and not _equal_windows(S, k, rep_of[g], r):
            bad.append(i)
    for i in bad:  # hash collisions: resolve by direct comparison
        r = start + i
        for g in range(len(reps)):
            if _equal_windows(S, k, reps[g], r):
                labels[i] = g
                break
        else:
            reps.append(r)
            labels[i] = len(reps) - 1
    # renumber by first occurrence for determinism
    order = np.argsort(np.asarray(reps, dtype=np.int64), kind="stable")
    remap = np.empty(len(reps), dtype=np.int64)
    remap[order] = np.arange(len(reps))
    return np.asarray(reps, dtype=np.int64)[order], remap[labels]


# ---------------------------------------------------------- window census


@dataclass
class WindowCensus:
    """Length-k windows of W = U**reps, counted through the residues of U.

    Window r (0 <= r < |U|) stands for every position congruent to r mod |U|,
    with weight w_hi for r <= split and w_lo above.
    """

    k: int
    period_len: int
    reps: int
    windows: int
    split: int
    w_hi: int
    w_lo: int
    exact: bool
    lower_hist: dict  # weight -> multiplicity, from a coarsening (equal words grouped, maybe more)
    upper_hist: dict  # weight -> multiplicity, from a refinement (only proven-equal words grouped)
    classes: list | None = None  # exact mode: (word, weight, representative residue)
    flagged_weight: int | None = None
    flag_threshold: int | None = None

    @property
    def covered_positions(self) -> int:
        return self.period_len * self.reps - self.k + 1


def census_periodic(U, reps: int, k: int, *, short_period: int | None = None, mask=None,
                    chain_step: int | None = None, workers: int = 1,
                    exact: bool | None = None, keep_words: bool = True) -> WindowCensus:
    """Census of length-k windows of U**reps.

    short_period: if given, also sum the weights of windows (with mask set) whose period is
    at most that value. chain_step: in inexact mode, windows r and r+chain_step proven equal by a
    shifted self-match are merged in the refinement.
    """
    U = as_word(U)
    P = int(U.size)
    L = P * reps
    if not 1 <= k <= L:
        raise ValueError("need 1 <= k <= |W|")
    n = min(P, L - k + 1)
    extra = n + k - 1
    S = np.tile(U, -(-extra // P))[:extra] if extra > P else U[:extra]
    S = np.ascontiguousarray(S)
    w_hi = (L - k) // P + 1
    split = (L - k) - (w_hi - 1) * P  # last residue with weight w_hi
    w_lo = w_hi - 1
    if exact is None:
        exact = n * k <= EXACT_COMPARE_BUDGET
    flagged = None
    if short_period is not None:
        flagged = _short_period_weight(S, k, n, short_period, mask, split, w_hi, w_lo, workers)
    if exact:
        reps_idx, labels = exact_window_labels(S, k, 0, n, workers)
        weights = np.zeros(len(reps_idx), dtype=np.int64)
        np.add.at(weights, labels, np.where(np.arange(n) <= split, w_hi, w_lo))
        hist: dict = {}
        for w in weights.tolist():
            hist[w] = hist.get(w, 0) + 1
        classes = None
        if keep_words:
            classes = [(word_str(S[r:r + k]), int(w), int(r)) for r, w in zip(reps_idx.tolist(), weights.tolist())]
        return WindowCensus(k, P, reps, n, split, w_hi, w_lo, True, hist, dict(hist), classes, flagged, short_period)
    keys = _hash_range(S, k, 0, n, shift_bit=True, split=split, workers=workers)
    keys.sort()
    lower = {int(a): int(b) for a, b in _group_runs(keys, w_hi, w_lo).items()}
    del keys
    linked = np.zeros(n, dtype=np.bool_)
    if chain_step and chain_step < n:
        d = chain_step
        cnt = n - d
        _flag_parallel_prefix(S, k, cnt, d, linked, workers)
    d = chain_step if chain_step else n
    upper = {int(a): int(b) for a, b in _chain_hist(linked, n, d, split, w_hi, w_lo).items()}
    return WindowCensus(k, P, reps, n, split, w_hi, w_lo, False, lower, upper, None, flagged, short_period)


def _short_period_weight(S, k, n, short_period, mask, split, w_hi, w_lo, workers) -> int:
    if short_period < 1:
        return 0
    flags = np.zeros(n, dtype=np.bool_)
    pmax = min(short_period, k)
    # every period <= pmax has a multiple in (pmax/2, pmax] that is also a period
    for p in range(pmax // 2 + 1, pmax + 1):
        if p >= k:
            flags[:] = True
            break
        _flag_parallel(S, k, n, p, k - p, flags, workers)
    m = np.ones(n, dtype=np.bool_) if mask is None else np.ascontiguousarray(as_word(mask)[:n].astype(np.bool_))
    return int(_masked_weight(flags, m, n, split, w_hi, w_lo))


def short_period_weight(U, reps: int, k: int, short_period: int, *, mask=None, workers: int = 1) -> int:
    """Total weight of windows of U**reps (residues with mask set) whose period is <= short_period."""
    U = as_word(U)
    P = int(U.size)
    L = P * reps
    if not 1 <= k <= L:
        raise ValueError("need 1 <= k <= |W|")
    n = min(P, L - k + 1)
    extra = n + k - 1
    S = np.ascontiguousarray(np.tile(U, -(-extra // P))[:extra] if extra > P else U[:extra])
    w_hi = (L - k) // P + 1
    split = (L - k) - (w_hi - 1) * P
    return _short_period_weight(S, k, n, short_period, mask, split, w_hi, w_hi - 1, workers)


def _flag_parallel(S, k, n, p, need, flags, workers):
    # windows near the end of S lack a partner t+p for the full range; they cannot be flagged
    # unless the match run fits, so restrict to r with r + need + p <= len(S)
    usable = min(n, S.size - need - p + 1)
    if usable <= 0:
        return
    chunks = _chunks(usable, workers)

    def job(ch):
        s, c = ch
        _shift_match_flags(S, k, s, c, p, need, flags[s:s + c])

    _run(job, chunks, workers)


def _flag_parallel_prefix(S, k, cnt, d, linked, workers):
    usable = min(cnt, S.size - k - d + 1)
    if usable <= 0:
        return
    chunks = _chunks(usable, workers)

    def job(ch):
        s, c = ch
        _shift_match_flags(S, k, s, c, d, k, linked[s:s + c])

    _run(job, chunks, workers)


# ------------------------------------------------------------- name multisets


@dataclass
class NameMultiset:
    """Atoms of the k-step name partition, as Lebesgue masses weight * cell.

    entries maps words to integer (or rational) weights when words are explicit;
    lower_hist / upper_hist give the same information as weight -> multiplicity
    histograms and also cover the hashed (inexact) mode. Normalized masses divide by
    the certified normalizer L; everything not covered (top-of-tower windows and the
    off-tower tail) is the residual.
    """

    k: int
    cell: Fraction
    normalizer: CertifiedValue
    covered_weight: int | Fraction
    entries: dict | None
    lower_hist: dict
    upper_hist: dict
    max_atoms: int | None = None
    flagged_weight: int | None = None
    flag_threshold: int | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_entries(cls, k, entries: dict, cell=Fraction(1), normalizer=None, max_atoms=None, covered=None, **meta):
        hist: dict = {}
        for w in entries.values():
            hist[w] = hist.get(w, 0) + 1
        cov = sum(entries.values(), Fraction(0)) if covered is None else covered
        if normalizer is None:
            normalizer = CertifiedValue.exact(as_fraction(cov) * as_fraction(cell))
        return cls(k, as_fraction(cell), normalizer, cov, dict(entries), hist, dict(hist),
                   max_atoms if max_atoms is not None else 2 ** k, meta=dict(meta))

    @property
    def exact_words(self) -> bool:
        return self.entries is not None

    @property
    def covered_mass(self) -> Fraction:
        return as_fraction(self.covered_weight) * self.cell

    def normalized(self, weight) -> CertifiedValue:
        mu = as_fraction(weight) * self.cell
        return CertifiedValue(mu, mu) / self.normalizer

    @property
    def residual(self) -> CertifiedValue:
        """Normalized mass not covered by any entry: 1 - covered/L."""
        cov = self.covered_mass
        L = self.normalizer
        lo = Fraction(1) - cov / as_fraction(L.lower)
        hi = Fraction(1) - cov / as_fraction(L.upper) if L.bounded else Fraction(1)
        return CertifiedValue(max(lo, Fraction(0)), hi)

    def items(self):
        """(word, normalized CertifiedValue) pairs; exact-word mode only."""
        if self.entries is None:
            raise ValueError("words are not explicit in hashed mode")
        for w, c in self.entries.items():
            yield w, self.normalized(c)

    @property
    def seen(self) -> int:
        return sum(self.upper_hist.values())

    def max_atom(self) -> CertifiedValue:
        wmax = max(self.upper_hist) if self.upper_hist else 0
        return self.normalized(wmax)


def period_range_measure(names: NameMultiset, p: int, q: int) -> CertifiedValue:
    """Certified normalized measure of the names whose period lies in [p, q]."""
    if p > q or p < 1:
        raise ValueError("need 1 <= p <= q")
    if names.entries is not None:
        tot = sum((c for w, c in names.entries.items() if p <= period(w) <= q), Fraction(0))
    elif p == 1 and names.flag_threshold == q and names.flagged_weight is not None:
        tot = names.flagged_weight
    else:
        raise ValueError("hashed multisets only answer the precomputed short-period query")
    mu = as_fraction(tot) * names.cell
    lo = CertifiedValue(mu, mu) / names.normalizer
    hi = lo.upper if lo.bounded else 1
    res = names.residual
    up = hi + res.upper if not isinstance(hi, float) and not isinstance(res.upper, float) else float(hi) + float(res.upper)
    return CertifiedValue(lo.lower, min(up, 1) if not isinstance(up, float) else min(up, 1.0))


# --------------------------------------------------------- substitution plans


@dataclass
class SubstitutionPlan:
    """W_n = ((W_{n-1} W_{n-1} 0 W_{n-1})**k_n 0**j_n)**(2 p_n), starting from a base word.

    stages[i] = (k, j, p) for stage base_stage + 1 + i.
    """

    base: np.ndarray
    base_stage: int
    stages: list
    memory_budget_symbols: int = DEFAULT_MEMORY_BUDGET_SYMBOLS

    def length(self, n: int) -> int:
        L = int(self.base.size)
        for k, j, p in self.stages[: n - self.base_stage]:
            L = 2 * p * (k * (3 * L + 1) + j)
        return L

    def block(self, n: int) -> np.ndarray:
        """U_n = (W W 0 W)**k 0**j with W = W_{n-1}; W_n = U_n**(2 p_n)."""
        if n <= self.base_stage:
            raise ValueError("the base word has no block decomposition")
        W = self.word(n - 1)
        k, j, _ = self.stages[n - self.base_stage - 1]
        unit = np.concatenate([W, W, np.zeros(1, np.uint8), W])
        return np.concatenate([np.tile(unit, k), np.zeros(j, np.uint8)])

    def block_reps(self, n: int) -> int:
        return 2 * self.stages[n - self.base_stage - 1][2] if n > self.base_stage else 1

    def fits(self, n: int) -> bool:
        return self.length(n) <= self.memory_budget_symbols

    def word(self, n: int) -> np.ndarray:
        if n == self.base_stage:
            return self.base
        if not self.fits(n):
            raise MemoryError(f"W_{n} has {self.length(n)} symbols, above the memory budget")
        return np.tile(self.block(n), self.block_reps(n))


def name_from_levels(level_symbols, plan: SubstitutionPlan, n: int):
    """Expand the plan to W_n; above the memory budget the plan itself is returned."""
    plan = SubstitutionPlan(as_word(level_symbols), plan.base_stage, plan.stages, plan.memory_budget_symbols)
    if not plan.fits(n):
        return plan
    return plan.word(n)


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
