import math
from fractions import Fraction as Q

import pytest

from grates.certified import CertifiedValue
from grates.entropy_functions import HIR, EntropyFunction, HFunction
from grates.orbit_entropy import EntropySeries
from grates.rank_one import build
from grates.rates import (Reindexer, SequenceSpec, d_xi0, fact59_check, lambda_E, lemma53_check,
                          lemma58_bound, lemma58_range, nonisomorphism_report, rate_report, reindex,
                          seq_eval)


def test_sequence_values():
    assert seq_eval(SequenceSpec("N"), 7) == 7
    assert seq_eval(SequenceSpec("Log2N"), 8) == 3
    assert seq_eval(SequenceSpec("HofLog2N"), 16) == 4
    assert seq_eval(SequenceSpec("HofLog2N", h=HFunction("HLog")), 2 ** 7) == 3
    assert seq_eval(SequenceSpec("PhiOf2PowMinusN", g=EntropyFunction.g0(2)), 7) == 3
    assert seq_eval(SequenceSpec("PhiOfLogIter", g=EntropyFunction.eta()), 1024) == 10
    assert seq_eval(SequenceSpec("Custom", table=((1, 5), (2, 9))), 2) == 9
    with pytest.raises(ValueError):
        seq_eval(SequenceSpec("N"), 0)


def test_h_not_regularly_varying_pairs():
    n = 20
    r1 = HIR(Q(4) ** n) / HIR(2 * Q(4) ** n)
    r2 = HIR(Q(4) ** n / 2) / HIR(Q(4) ** n)
    assert abs(r1 - Q(3, 4)) < Q(1, 100) and abs(r2 - Q(2, 3)) < Q(1, 100)
    # closed forms (3*2^n - 2)/(4*2^n - 2) and (2*2^n - 2)/(3*2^n - 2)
    assert r1 == Q(3 * 2 ** n - 2, 4 * 2 ** n - 2) and r2 == Q(2 * 2 ** n - 2, 3 * 2 ** n - 2)


def test_reindex_step_function():
    nu = Reindexer((1, 3, 7))
    assert [reindex(SequenceSpec("N"), nu, n) for n in range(1, 8)] == [1, 1, 3, 3, 3, 3, 7]
    with pytest.raises(ValueError):
        Reindexer((3, 1))
    with pytest.raises(ValueError):
        nu.index(Q(1, 2))


def test_zeta_and_scaled_thresholds():
    assert Reindexer.zeta([2, 29]).thresholds == (8, 1682)
    assert Reindexer.scaled([29, 5051], Q(1, 5)).thresholds == (Q(29, 5), Q(5051, 5))


def test_lambda_E():
    assert lambda_E(Q(1, 2)) == Q(1, 16)
    lam = lambda_E(CertifiedValue(Q(1, 4), Q(3, 4)))
    assert lam.lower == Q(3, 64) and lam.upper == Q(1, 16)
    with pytest.raises(ValueError):
        lambda_E(Q(1))


def test_rate_report_and_lemma53():
    ser = EntropySeries(entries=[(n, CertifiedValue.exact(Q(n, 2))) for n in range(1, 9)],
                        residuals=[0] * 8)
    rep = rate_report(ser, SequenceSpec("N"), c=0.5)
    assert all(r.lower == Q(1, 2) for _, r in rep.ratios)
    assert "True" in rep.verdict
    nu = Reindexer((1, 3, 7))
    rep2 = rate_report(ser, SequenceSpec("N"), nu=nu)
    assert rep2.thresholds == [0, 0, 1, 1, 1, 1, 2, 2]
    assert lemma53_check(ser, SequenceSpec("N"), nu)


def test_d_xi0_by_hand():
    d, flagged = d_xi0([2, 29])
    assert flagged and d == (6 * Q(8, 29) + 2) * (1 + Q(4, 29)) + 10 == Q(11908, 841)
    d3, _ = d_xi0([2, 29, 5051])
    expect = (6 * Q(29 ** 3, 5051) + 2) * (1 + Q(4, 29) + Q(841, 5051)) + 10
    assert d3 == expect


def test_lemma58_pieces_against_float_formula():
    s = build([2, 29, 5051])
    rep = lemma58_bound(s, 1682, 2, 1, Q(1, 5), 2, strict=False)
    p, pn, k = 29, 5051, 1682
    A = 2 * (math.log2(6 * p * p) / 2 + 4)
    C = (k / pn) * 2 * (math.log2(k) / 2 + 0.5 + 4)
    d = float(d_xi0([2, 29, 5051])[0])
    assert rep.parts["m1"] == rep.parts["m2"] == 1
    assert rep.bound == pytest.approx(A + C + d + 2, rel=1e-9)
    assert rep.bound <= A + C + d + 2
    assert not rep.in_range and not rep.conditions["q_over_p_n_lt_a"]
    with pytest.raises(ValueError):
        lemma58_bound(s, 1682, 2, 1, Q(1, 5), 2)


def test_lemma58_range_empty_at_small_primes():
    s = build([2, 29, 5051])
    lo, hi = lemma58_range(s, 1, Q(1, 5))
    assert (lo, hi) == (56, 5)
    assert fact59_check(s, None, 1).all_hold is None


def test_fact59_single_k():
    s = build([2, 29, 5051])
    rep = fact59_check(s, 1682, 2)
    assert rep.checked and rep.note


def test_noniso_same_system_not_satisfied():
    rep = nonisomorphism_report([2, 29, 5051], [2, 29, 5051], Q(1, 10), Q(1, 10), 2, (1, 10 ** 12))
    assert rep.verdict == "not-satisfied" and rep.infimum > rep.target


def test_noniso_synthetic_pair_satisfied():
    xi0 = [20011, 160352290506494627]
    xi = [2, 29, 2831539]
    a = Q(1, 10000)
    rep = nonisomorphism_report(xi0, xi, a, Q(2498, 10000), 2, (1, a * xi0[1]))
    assert rep.verdict == "criterion-satisfied-on-range"
    assert rep.infimum < rep.target


def test_noniso_argument_checks():
    with pytest.raises(ValueError):
        nonisomorphism_report([2, 29], [2, 29], Q(1, 5), Q(1, 10), 2, (1, 100))
