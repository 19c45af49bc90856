# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Monte Carlo checks of the Doob and BDG transfers
#
# Partial sums of independent centred steps are martingales. We simulate
# them, compare moments of the running maximum with the maximal
# inequalities, then push a fitted moment profile through each kernel and
# compare the resulting tail bound with the empirical tail.

# %%
import math
from pathlib import Path

import numpy as np

from glstail.harness import ExperimentConfig, fit_power_exponent, load_config, simulate_martingale, verify_bdg, verify_doob
from glstail.moments import empirical_moment

# %% [markdown]
# ## Simulation
#
# Trial `i` draws from a Philox stream keyed by `(seed, i)`, so the output
# does not depend on the number of worker threads.

# %%
batch = simulate_martingale(64, 20_000, "gaussian", seed=7, workers=2)
print("E xi_n^2 ~", empirical_moment(batch.terminal, 2).value ** 2, "(exact 64)")
print("pathwise M* >= xi_n:", bool(np.all(batch.max_signed >= batch.terminal_signed)))
print("fitted m on [2, 16]:", round(fit_power_exponent(batch.terminal, (2.0, 16.0)).m, 3))

rad = simulate_martingale(64, 1000, "rademacher", seed=7)
print("rademacher sqrt<M,M> values:", np.unique(rad.quad_variation_sqrt.values))

# %% [markdown]
# ## Doob

# %%
out = Path("out")
cfg = ExperimentConfig(kernel="doob", law="gaussian", n_trials=20_000, seed=7, out_dir=out / "doob")
report = verify_doob(cfg, batch)
print(report.summary())
report.write(cfg.out_dir)

# %% [markdown]
# ## BDG
#
# For unit Rademacher steps `<M,M> = n` on every path, so the right side
# is `sqrt(e) sqrt(n)` exactly. BDG exceedances are warnings, not failures.

# %%
cfg_bdg = ExperimentConfig(kernel="bdg", law="rademacher", n_trials=20_000, seed=7, p_grid=(2, 4, 6), out_dir=out / "bdg")
bdg = verify_bdg(cfg_bdg)
print(bdg.summary())
print("rhs / sqrt(e):", bdg.rhs / math.sqrt(math.e))

# %% [markdown]
# The same runs can be described in an INI file and launched with
# `glstail verify-doob --config notebooks/experiment.ini`.

# %%
ini = Path(__file__).with_name("experiment.ini") if "__file__" in globals() else Path("experiment.ini")
if ini.exists():
    print(load_config(ini))
