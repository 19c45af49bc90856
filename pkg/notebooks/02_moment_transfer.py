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
# # Norms and moment transfer
#
# Moment oracles give `|zeta|_p` for `p >= 1`. The norm
# `sup_p |zeta|_p / kappa(p)` measures a variable against a generating
# function, and a transfer kernel `|xi|_p <= g(p, r, |eta|_r)` moves
# moment information from `eta` to `xi`.

# %%
import math

import numpy as np

from glstail import bdg_kernel, build_psi_function, doob_kernel, gls_norm, make_power, natural_function, psi_from_kernel
from glstail.moments import (
    EmpiricalSample,
    exponential_oracle,
    function_oracle,
    gaussian_oracle,
    rademacher_oracle,
    sample_oracle,
)
from glstail.psi_functions import PDomain, log_grid

# %% [markdown]
# ## Oracles and norms

# %%
g = gaussian_oracle()
kappa = make_power(2, PDomain.closed(1, 3))
p = np.array([1.0, 2.0, 3.0])
print("|N|_p / sqrt(p):", np.round(g(p) / kappa(p), 4))
print("norm and argmax:", gls_norm(g, kappa, grid=p))

# %% [markdown]
# The natural generating function of a variable is its own moment curve,
# so its norm is exactly one.

# %%
for oracle in (rademacher_oracle(), g, exponential_oracle()):
    kappa0 = natural_function(oracle, PDomain.closed(1, 40))
    print(f"{oracle.label:>16}: kappa0(2) = {kappa0(2.0):.6f}, norm = {gls_norm(oracle, kappa0).value}")

# %% [markdown]
# Sample-backed oracles use log-sum-exp for large `p` and a jackknife for
# the standard error.

# %%
rng = np.random.default_rng(1)
s = EmpiricalSample.from_outcomes(rng.standard_normal(50_000))
so = sample_oracle(s)
for q in (2.0, 6.0, 12.0):
    print(f"p={q:>4}: sample {so(q):.4f} +- {so.stderr(q):.4f}, exact {g(q):.4f}")

# %% [markdown]
# ## Doob and BDG kernels
#
# Doob: `|M*|_p <= p/(p-1) |eps_n|_p` on `R(p) = {p}`. Below `p0` the
# transferred function is frozen at its value at `p0`, which Lyapunov's
# inequality allows.

# %%
eta = function_oracle(make_power(2))
print("psi(2) with p0=2:", psi_from_kernel(doob_kernel(), eta, 2.0, p0=2.0), "vs 2 sqrt(2) =", 2 * math.sqrt(2))

grid = log_grid(1, 16, 9)
psi = build_psi_function(doob_kernel(p0=4.0), eta, grid)
print(np.column_stack([grid, psi(grid)]).round(4))

# %% [markdown]
# BDG: `|M*|_p <= sqrt(e) |<M,M>|_{p/2}^{1/2}`, a power kernel with
# `alpha = 1/2` on `R(p) = {p/2}`.

# %%
qv_profile = function_oracle(make_power(1))
for q in (2.0, 4.0, 8.0):
    print(q, psi_from_kernel(bdg_kernel(), qv_profile, q), math.sqrt(math.e * q / 2))
