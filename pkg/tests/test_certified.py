import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from grates.certified import (INF, CertifiedValue, float_down, float_up, log2_bounds, log2_exact,
                              sum_down, sum_up)

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)


def test_exact_arithmetic_stays_exact():
    a = CertifiedValue.exact(Fraction(1, 3))
    b = CertifiedValue.exact(Fraction(2, 7))
    assert (a + b).is_exact and (a + b).lower == Fraction(13, 21)
    assert (a * b).lower == Fraction(2, 21)
    assert (a / b).upper == Fraction(7, 6)


def test_lower_above_upper_rejected():
    with pytest.raises(ValueError):
        CertifiedValue(2, 1)


def test_unbounded_upper():
    v = CertifiedValue(Fraction(1), INF)
    assert not v.bounded and v.width == INF
    assert v.contains(10**100)


@given(fractions, fractions)
def test_float_rounding_brackets_value(x, y):
    s = x + y
    assert Fraction(float_down(s)) <= s <= Fraction(float_up(s))


@given(st.lists(fractions, min_size=1, max_size=30))
def test_directed_sums_bracket_exact_sum(xs):
    floats = [float(x) for x in xs]
    exact = sum(Fraction(f) for f in floats)
    assert Fraction(sum_down(floats)) <= exact <= Fraction(sum_up(floats))


@given(fractions, fractions, fractions, fractions)
def test_interval_product_contains_products(a, b, c, d):
    x = CertifiedValue(min(a, b), max(a, b))
    y = CertifiedValue(min(c, d), max(c, d))
    z = x * y
    for u in (a, b):
        for v in (c, d):
            assert z.contains(u * v)


@given(st.integers(-60, 60))
def test_log2_exact_on_powers_of_two(e):
    assert log2_exact(Fraction(2) ** e) == e


@given(st.fractions(min_value=Fraction(1, 10**9), max_value=10**9))
def test_log2_bounds_enclose(q):
    lo, hi = log2_bounds(q)
    assert lo <= math.log2(q) <= hi


def test_floor_candidates():
    assert CertifiedValue(Fraction(7, 2), Fraction(9, 2)).floor_candidates() == [3, 4]
    assert CertifiedValue.exact(Fraction(117)).floor_candidates() == [117]
