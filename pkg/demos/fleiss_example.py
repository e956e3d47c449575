# %% [markdown]
# # Agreement on a three-category diagnosis
#
# Two raters classify 100 subjects as psychotic, neurotic or organic.  The
# delta model splits the diagonal into deliberate agreement (``alpha_i``) and
# agreement by chance, and reports the global agreement ``Delta``.

# %%
import numpy as np

from deltaagree import (
    ContingencyTable,
    ac_estimates,
    classic_estimates,
    cohen_kappa,
    fit_delta_mle,
    unbiased_estimates,
)

table = ContingencyTable([[75, 1, 4], [5, 4, 1], [0, 0, 10]])
print(table.cells)
print("observed agreement", np.trace(table.proportions))

# %% [markdown]
# ## Maximum-likelihood fit
#
# The solver reports which category (if any) sits on the larger root of its
# quadratic.  Here category 1 does: both raters use it for 80% of their
# random answers, so ``pi_11 + pi_12 > 1``.

# %%
fit = fit_delta_mle(table)
print("B =", fit.B, " Delta =", fit.delta)
print("pi1 =", fit.pi1)
print("pi2 =", fit.pi2)
print("larger root on category", None if fit.large_root is None else fit.large_root + 1)
print("residual", fit.residual)

# %% [markdown]
# ## Classic, U and AC estimates side by side

# %%
fams = [classic_estimates(fit), unbiased_estimates(fit), ac_estimates(fit)]
print(f"{'':10s}" + "".join(f"{f.kind:>10s}" for f in fams))
print(f"{'Delta':10s}" + "".join(f"{f.delta:10.3f}" for f in fams))
for i in range(table.K):
    print(f"{'alpha_' + str(i + 1):10s}" + "".join(f"{f.alpha[i]:10.3f}" for f in fams))
for i in range(table.K):
    print(f"{'S_' + str(i + 1):10s}" + "".join(f"{f.consistency[i]:10.3f}" for f in fams))

# %% [markdown]
# Kappa for comparison.  It is close to the classic Delta here because the
# marginals are balanced.

# %%
print("kappa =", round(cohen_kappa(table).kappa, 3))

# %% [markdown]
# ## Estimated standard errors

# %%
for f in fams[:2]:
    v = f.variances
    print(f.kind, "SE(Delta) =", np.sqrt(v.delta).round(4), " SE(alpha) =", np.sqrt(v.alpha).round(4))
