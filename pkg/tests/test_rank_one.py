from fractions import Fraction as Q

import pytest

from grates.geometry import IntervalSet, difference
from grates.rank_one import (AlignedSet, GrowthAssumption, PrimeSequenceError, RankOneSystem, build,
                             next_valid_prime, stage_parameters, validate_primes)


def cut_and_stack_oracle(tower, x_prev, k, j, p):
    """One stage of cutting and stacking on explicit Fraction levels [a, b)."""

    def cut(levels, parts):
        w = (levels[0][1] - levels[0][0]) / parts
        return [[(a + i * w, a + (i + 1) * w) for a, _ in levels] for i in range(parts)]

    w = (tower[0][1] - tower[0][0]) / 3
    c1, c2, c3 = cut(tower, 3)
    spacer = (x_prev, x_prev + w)
    t = c1 + c2 + [spacer] + c3
    t = [lv for col in cut(t, k) for lv in col]
    y = x_prev + w
    sw = w / k
    t += [(y + i * sw, y + (i + 1) * sw) for i in range(j)]
    t = [lv for col in cut(t, p) for lv in col]
    t = [lv for col in cut(t, 2) for lv in col]
    return t


def test_stage_one_values():
    s = build([2, 29, 5051])
    st0, st1 = s.stage(0), s.stage(1)
    assert st0.x == 8
    assert (st1.y, st1.k, st1.j, st1.x) == (Q(25, 3), 1, 4, Q(29, 3))
    assert st1.height == 1682 and st1.level_len == Q(1, 174)


def test_levels_match_explicit_cut_and_stack():
    s = build([2, 29])
    tower0 = [(Q(i), Q(i + 1)) for i in range(8)]
    st1 = s.stage(1)
    ref = cut_and_stack_oracle(tower0, Q(8), st1.k, st1.j, st1.p)
    got = [(int(a) * st1.level_len, (int(a) + 1) * st1.level_len) for a in s.levels(1)]
    assert got == ref


def test_stage_map_extends_and_preserves_measure():
    s = build([2, 29])
    T0, T1 = s.stage_map(0), s.stage_map(1)
    assert T1.agrees_with(T0)
    assert T1.source_measure() == T1.image_measure() == s.stage(1).x - s.stage(1).level_len
    assert not difference(T0.domain, T1.domain)


@pytest.mark.parametrize("n", [0, 1])
def test_integer_checks(n):
    c = build([2, 29]).check_stage_integer(n)
    assert c["tiles_tower"] and c["measure_is_x"] and c["extends_previous"]


def test_prime_validation():
    with pytest.raises(PrimeSequenceError):
        validate_primes([2, 25])
    with pytest.raises(PrimeSequenceError) as e:
        validate_primes([2, 23])  # 6*4+1 = 25 > 23
    assert e.value.index == 1
    assert next_valid_prime(2) == 29
    assert next_valid_prime(29) == 5051


def test_parameters_of_third_stage():
    ps = stage_parameters([2, 29, 5051])
    st = ps[2]
    assert (st.k, st.j) == (1, 4) and st.height == 2 * 5051 ** 2
    assert st.x == Q(5051, 522)
    assert st.q == 6 * 29 ** 2 + 1


def test_normalizer_brackets_and_tail():
    s = build([2, 29, 5051])
    L = s.normalizer()
    assert L.lower == s.last.x and L.bounded
    assert L.upper > L.lower
    assert not build([2, 29, 5051], assumption=None).normalizer().bounded
    t = s.tail_bound(1)
    assert t.lower == s.last.x - s.stage(1).x


def test_growth_assumption_from_prefix():
    a = GrowthAssumption.from_prefix([2, 29, 5051])
    assert a.gamma == 3 and a.C == Q(29 ** 3, 5051)


def test_partial_system_flagged():
    s = build([2, 29], stages=5)
    assert s.partial and s.n_stages == 2
    with pytest.raises(IndexError):
        s.stage(2)


def test_json_round_trip():
    s = build([2, 29, 5051])
    r = RankOneSystem.from_json(s.to_json())
    assert r.to_json() == s.to_json()
    bad = s.to_json()
    bad["stages"][1]["x"] = "10"
    with pytest.raises(ValueError):
        RankOneSystem.from_json(bad)


def test_base_word_and_mask():
    s = build([2, 29])
    E = AlignedSet.unit()
    w = s.base_word(1, E)
    assert w.size == s.stage(1).height and int(w.sum()) == 2 * 29 * 3
    assert s.E_intervals(E) == IntervalSet.interval(0, 1)
    m = s.tower_mask(1)
    assert m.size * 2 * 29 == s.stage(1).height and int(m.sum()) == 3 * 8
