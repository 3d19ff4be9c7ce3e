import math
from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grates.certified import CertifiedValue
from grates.entropy_functions import GIR, EntropyFunction, catalog, jensen_bound_upper
from grates.geometry import LabeledPartition
from grates.orbit_entropy import (SubshiftSpec, cylinder_measures, default_stage, entropy_of_names,
                                  entropy_series, geometric_names, join_sequence_geometric,
                                  name_measures_symbolic, subshift_complexity)
from grates.rank_one import AlignedSet, build
from grates.words import NameMultiset

ETA = EntropyFunction.eta()
G0 = EntropyFunction.g0(2)
UNIT = AlignedSet.unit()


@pytest.fixture(scope="module")
def s2():
    return build([2, 29])


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
def test_geometric_equals_symbolic(s2, k):
    M = default_stage(s2, k)
    geo = dict(geometric_names(s2, UNIT, k, M).items())
    sym = dict(name_measures_symbolic(s2, M, UNIT, k).items())
    assert geo == sym


@pytest.mark.parametrize("k", [1, 2, 8, 40])
def test_symbolic_conserves_mass(s2, k):
    names = name_measures_symbolic(s2, 1, UNIT, k)
    st1 = s2.stage(1)
    assert sum(names.entries.values()) * st1.level_len + (k - 1) * st1.level_len == st1.x


def test_two_step_counts(s2):
    names = name_measures_symbolic(s2, 1, UNIT, 2)
    assert names.entries == {"10": 174, "00": 1334, "01": 173}


def test_geometric_join_covered_measure(s2):
    joins = join_sequence_geometric(s2, UNIT, 5, 1)
    ell, x = s2.stage(1).level_len, s2.stage(1).x
    for J in joins:
        assert J.partition.ambient.measure == x - (J.n - 1) * ell
        assert J.uncovered.measure == (J.n - 1) * ell


def test_join_needs_tall_tower(s2):
    with pytest.raises(ValueError):
        join_sequence_geometric(s2, UNIT, 8, 0)


def test_exact_partition_entropy_is_exact():
    P = LabeledPartition.from_cuts([0, Q(1, 4), Q(1, 2), 1])
    ser = entropy_series(ETA, [P])
    H = ser.entries[0][1]
    assert H.is_exact and H.lower == Q(3, 2)


@pytest.mark.parametrize("n", [1, 5, 10, 16, 30, 60])
def test_bernoulli_g0_entropy(n):
    H = entropy_of_names(G0, cylinder_measures(SubshiftSpec.full_shift(), n))
    assert H.contains(math.log2(1 + n)) and H.width < 1e-9
    if n in (1, 3, 7, 15):
        assert H.lower == H.upper


def test_bernoulli_g0_exact_at_dyadic_plus_one():
    H = entropy_of_names(G0, cylinder_measures(SubshiftSpec.full_shift(), 15))
    assert H.lower == H.upper == 4


def test_markov_entropy_matches_formula():
    P = [[Q(1, 2), Q(1, 2)], [1, 0]]
    spec = SubshiftSpec.markov(P, [Q(2, 3), Q(1, 3)])
    names = cylinder_measures(spec, 10)
    assert sum(names.entries.values()) == 1
    H = entropy_of_names(ETA, names)
    # H(P_n) = H(pi) + (n-1) * pi_0 * 1 bit
    expect = -(2 / 3) * math.log2(2 / 3) - (1 / 3) * math.log2(1 / 3) + 9 * (2 / 3)
    assert H.contains(expect) or abs(H.mid() - expect) < 1e-12


@pytest.mark.parametrize("n", range(1, 12))
def test_golden_mean_complexity(n):
    fib = [1, 2]
    while len(fib) <= n:
        fib.append(fib[-1] + fib[-2])
    assert subshift_complexity(SubshiftSpec.sft(["11"]), n) == fib[n]


def test_subshift_validation():
    with pytest.raises(ValueError):
        SubshiftSpec.markov([[Q(1, 2), Q(1, 2)], [1, 0]], [Q(1, 2), Q(1, 2)])
    with pytest.raises(ValueError):
        SubshiftSpec.sft(["12"])


@st.composite
def residual_instances(draw):
    k = draw(st.integers(1, 5))
    n_seen = draw(st.integers(1, 2 ** k))
    words = draw(st.lists(st.text("01", min_size=k, max_size=k), min_size=n_seen, max_size=n_seen, unique=True))
    weights = {w: draw(st.integers(1, 20)) for w in words}
    extra = draw(st.integers(0, 40))
    return k, weights, extra


@given(residual_instances(), st.sampled_from(catalog()), st.integers(0, 2 ** 31))
@settings(max_examples=80)
def test_water_filling_dominates_random_completions(inst, g, seed):
    k, weights, extra = inst
    total = sum(weights.values()) + extra
    names = NameMultiset.from_entries(k, weights, normalizer=CertifiedValue.exact(total))
    H = entropy_of_names(g, names)
    assert float(H.upper) <= float(jensen_bound_upper(g, 2 ** k)) + 1e-12
    rng = np.random.default_rng(seed)
    seen = np.array([weights[w] for w in weights], dtype=float) / total
    free = extra / total
    n_all = 2 ** k
    for _ in range(20):
        x = np.zeros(n_all)
        x[: len(seen)] = seen
        x += rng.dirichlet(np.ones(n_all)) * free
        val = sum(float(g.value(float(min(v, 1.0)))) for v in x if v > 0)
        assert H.lower - 1e-9 <= val <= float(H.upper) + 1e-9


def test_residual_free_multiset_is_tight():
    names = NameMultiset.from_entries(2, {"00": 1, "01": 1, "10": 1, "11": 1})
    H = entropy_of_names(ETA, names)
    assert H.lower == H.upper == 2


def test_gir_series_monotone(s2):
    src = [name_measures_symbolic(s2, 1, UNIT, k) for k in range(1, 17)]
    ser = entropy_series(GIR, src)
    assert ser.monotone_violations() == []
    assert [n for n, _ in ser.entries] == list(range(1, 17))
