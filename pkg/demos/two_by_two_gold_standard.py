# %% [markdown]
# # A 2x2 table with a gold standard
#
# Eighty of 100 subjects are classified the same way, yet kappa is negative
# because both raters put 90% of subjects in category 1.  The delta model is
# not identified with two categories; an empty virtual category is added and
# every cell gets 0.5 before fitting.

# %%
from deltaagree import ContingencyTable, augment_2x2, cohen_kappa, fit_2x2

table = ContingencyTable([[80, 10], [10, 0]])
print("kappa =", round(cohen_kappa(table).kappa, 3))
print(augment_2x2(table).cells)

# %%
rep = fit_2x2(table)
for kind, s in rep.starred.items():
    print(f"{kind:8s} Delta* = {s.delta:.3f}  alpha* = {s.alpha.round(3)}  S = {s.consistency.round(3)}")

# %% [markdown]
# ## Conformity and predictivity
#
# With the row rater as gold standard, conformity ``F_i`` is the chance
# corrected share of gold-standard category ``i`` the other rater confirms,
# and predictivity ``P_i`` the share of the other rater's ``i`` answers that
# are right.  The table is symmetric, so ``F_i = P_i``.

# %%
for kind in ("classic", "U"):
    g = rep.gold_standard(kind)
    print(f"{kind:8s} F = {g.conformity.round(3)}  P = {g.predictivity.round(3)}  Var(F) = {g.var_conformity.round(4)}")
