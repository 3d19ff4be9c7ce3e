# %% [markdown]
# # Rank-one towers by cutting and stacking
# Build the system for the primes (2, 29, 5051), look at the stage parameters, and follow a
# point through the stage-1 map.

# %%
from fractions import Fraction

from grates import build
from grates.rank_one import AlignedSet

system = build([2, 29, 5051])
for st in system.stages:
    print(f"stage {st.n}: p={st.p} height={st.height} x={st.x} level length={st.level_len}")

# %% [markdown]
# The normalizer is the total measure of the limiting space. Only a growth assumption on the
# unknown future primes makes its upper end finite.

# %%
L = system.normalizer()
print("L in", float(L.lower), float(L.upper), "assumption:", system.assumption)

# %%
T = system.stage_map(1)
x = Fraction(1, 3)
orbit = [x]
for _ in range(10):
    orbit.append(T(orbit[-1]))
print("orbit of 1/3:", [str(v) for v in orbit])

# %% [markdown]
# The 01-name of the base of tower 1 relative to E = [0, 1) is the word W_1.

# %%
from grates.words import word_str

W1 = system.base_word(1, AlignedSet.unit())
print(len(W1), word_str(W1[:120]))

# %%
check = system.check_stage_integer(2)
print({k: v for k, v in check.items() if k != "top_level_left"})
