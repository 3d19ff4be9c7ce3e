# %% [markdown]
# # Certified entropy of name partitions
# H(g, P_k) for the partition {E, complement} with E = [0, 1), computed from the symbolic names.
# Each value is an interval: unseen atoms and the unknown tail mass widen it.

# %%
from grates import build, entropy_series, name_measures_symbolic
from grates.entropy_functions import GIR, EntropyFunction
from grates.orbit_entropy import default_stage
from grates.rank_one import AlignedSet

system = build([2, 29, 5051])
E = AlignedSet.unit()
sources = [name_measures_symbolic(system, default_stage(system, k), E, k) for k in range(1, 30)]
series = entropy_series(GIR, sources)
for (k, H), res in zip(series.entries, series.residuals):
    print(f"k={k:2d}  H in [{float(H.lower):.4f}, {float(H.upper):.4f}]  width {H.width:.3f}  residual {float(res):.2e}")

# %% [markdown]
# The width grows with k because the residual mass may spread over up to 2^k unseen atoms.
# A Bernoulli shift gives a sharp comparison: with g0 in base 2, H(P_n) = log2(1 + n).

# %%
import math

from grates.orbit_entropy import SubshiftSpec, cylinder_measures, entropy_of_names

g0 = EntropyFunction.g0(2)
for n in (1, 7, 20, 60):
    H = entropy_of_names(g0, cylinder_measures(SubshiftSpec.full_shift(), n))
    print(n, float(H.lower), math.log2(1 + n))

# %% [markdown]
# The two computation paths agree atom by atom.

# %%
from grates.orbit_entropy import geometric_names

geo = dict(geometric_names(system, E, 8, 1).items())
sym = dict(name_measures_symbolic(system, 1, E, 8).items())
print("paths agree:", geo == sym, "atoms:", len(geo))
