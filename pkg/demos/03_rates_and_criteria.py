# %% [markdown]
# # Rates, the short-period mechanism, and the non-isomorphism criterion

# %%
from fractions import Fraction

from grates import build
from grates.entropy_functions import HIR
from grates.rank_one import AlignedSet
from grates.rates import (SequenceSpec, lemma58_verify, nonisomorphism_report, rate_report,
                          search_synthetic_pair, theorem54_check)

# %% [markdown]
# h is not regularly varying: along a_n = 4^n, b_n = 2 * 4^n the ratio tends to 3/4, along
# c_n = 4^n / 2, d_n = 4^n to 2/3.

# %%
for n in (5, 10, 20):
    four = Fraction(4) ** n
    print(n, float(HIR(four) / HIR(2 * four)), float(HIR(four / 2) / HIR(four)))

# %%
system = build([2, 29, 5051])
rep = theorem54_check(system, AlignedSet.unit(), 1)
print(rep.summary())

# %% [markdown]
# The rank-one entropy bound at k = 1682 (evaluated outside the lemma's k range, which is empty
# for primes this small).

# %%
l58 = lemma58_verify(system, 1682, 2, 1, Fraction(1, 5), 2, strict=False)
print(f"H.upper = {float(l58.H.upper):.4f} <= bound {l58.bound:.4f}: {l58.holds}")
print(l58.conditions)

# %%
from grates.orbit_entropy import default_stage, entropy_series, name_measures_symbolic
from grates.entropy_functions import GIR

series = entropy_series(GIR, [name_measures_symbolic(system, default_stage(system, k), AlignedSet.unit(), k)
                              for k in (2, 4, 8, 16, 32)])
print(rate_report(series, SequenceSpec("HofLog2N")).verdict)

# %% [markdown]
# The criterion compares a xi0 (h(log2 n)) with zeta(h(log2 n)) on a finite range. The same
# system against itself does not satisfy it; a synthetic pair found by search does.

# %%
same = nonisomorphism_report([2, 29, 5051], [2, 29, 5051], Fraction(1, 10), Fraction(1, 10), 2, (1, 10 ** 12))
print(same.verdict, same.infimum, same.target)
found = search_synthetic_pair()
print(found["xi0"], found["xi"], found["report"].verdict, found["report"].infimum, found["report"].target)
