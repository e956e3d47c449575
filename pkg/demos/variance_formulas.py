# %% [markdown]
# # Asymptotic variances at known parameters
#
# For the built-in settings the variances of the estimators follow in
# closed form from the true parameters.  Setting 1 has both raters
# responding at random with ``pi = (0.2, 0.3, 0.5)``, which puts
# ``pi_31 + pi_32 = 1`` exactly: ``X_3`` is infinite and the formulas are
# evaluated through their limits.

# %%
import numpy as np

from deltaagree import asymptotic_variances, chance_quantities, get_setting, pi_variance, population_truths

s1 = get_setting(1)
cq = chance_quantities(s1.params.pi1, s1.params.pi2)
print("X =", cq.X)
print("X/(X-1) ->", cq.ratio())
va = asymptotic_variances(s1.params, s1.n)
print("V_A(Delta) =", round(va.delta, 4), " V_A(alpha_3) =", round(va.alpha[2], 4), " V_A(S_3) =", round(va.consistency[2], 4))

# %% [markdown]
# The limit agrees with the finite formula evaluated just off the pole.

# %%
from deltaagree import PopulationParams

for eps in (1e-3, 1e-5, 1e-7):
    near = PopulationParams(s1.params.alpha, s1.params.pi1, s1.params.pi2 + np.array([0, -eps, eps]))
    print(eps, asymptotic_variances(near, 30).alpha[2])

# %% [markdown]
# ## All 48 settings

# %%
print(" id  K   n  Delta     S3   V_A(D)")
for sid in range(1, 49):
    s = get_setting(sid)
    t = population_truths(s.params)
    print(f"{sid:3d} {s.K:2d} {s.n:3d}  {t.delta:.2f}  {t.consistency[2]:.4f}  {asymptotic_variances(s.params, s.n).delta:.4f}")

# %% [markdown]
# Variance of the random-response probabilities in setting 25.

# %%
print(pi_variance(get_setting(25).params, 0, 1, 30))
