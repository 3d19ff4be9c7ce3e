"""Shared hypothesis strategies: grid-aligned interval sets and rational partitions."""

from fractions import Fraction

from hypothesis import strategies as st

from grates.geometry import IntervalSet, LabeledPartition

GRID = 24


@st.composite
def cell_masks(draw, n=GRID):
    return tuple(draw(st.lists(st.booleans(), min_size=n, max_size=n)))


def mask_to_set(mask, n=GRID) -> IntervalSet:
    return IntervalSet([(Fraction(i, n), Fraction(i + 1, n)) for i, m in enumerate(mask) if m])


@st.composite
def partitions(draw, max_atoms=8):
    """Random partition of [0,1) into labeled unions of rational intervals."""
    cuts = sorted(set(draw(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=60),
                                    min_size=1, max_size=12))) - {Fraction(0), Fraction(1)})
    cuts = [Fraction(0)] + cuts + [Fraction(1)]
    nlab = draw(st.integers(1, max_atoms))
    labels = [str(draw(st.integers(0, nlab - 1))) for _ in range(len(cuts) - 1)]
    return LabeledPartition.from_cuts(cuts, labels)


@st.composite
def subsets(draw):
    cuts = sorted(set(draw(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=60),
                                    min_size=2, max_size=10))))
    ivs = [(a, b) for i, (a, b) in enumerate(zip(cuts, cuts[1:])) if i % 2 == 0]
    return IntervalSet(ivs) if ivs else IntervalSet.empty()
