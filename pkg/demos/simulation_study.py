# %% [markdown]
# # Monte Carlo check of the estimators
#
# Draw multinomial tables from a known population, fit each one, and compare
# the average estimate with the truth.  Replicate ``i`` always uses the same
# random stream, so adding workers does not change the numbers.
#
# The full study (48 settings, 10,000 replicates) is an offline job:
#
#     deltaagree simulate --all --replicates 10000 --seed 0 --workers 8 --format csv > sweep.csv

# %%
from deltaagree import get_setting, run_setting

N = 2000  # raise to 10_000 for the full-size study
for sid in (1, 2, 13):
    for s in run_setting(get_setting(sid), N=N, seed=0):
        print(f"setting {sid:2d} {s.target:6s} truth {s.truth:.4f}  mean {s.mean:.4f}  mean_U {s.mean_U:.4f}"
              f"  V_A {s.V_A:.4f}  V_E {s.V_E:.4f}  V_E_U {s.V_E_U:.4f}  used {s.used}/{s.N}")

# %% [markdown]
# The U estimator removes most of the downward bias of the classic one in
# small samples, at a slightly lower empirical variance.
