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
# # From moment growth to tail bounds
#
# A random variable whose moments grow like `|zeta|_p <= C psi(p)` has a
# tail bounded by `exp(-h*(ln(t/C)))`, where `h*` is the Young-Fenchel
# transform of `h(p) = p ln psi(p)`. This notebook tabulates `h*`, checks
# it against the closed form for power functions and turns it into tails.

# %%
import math

import numpy as np

from glstail import (
    TailBound,
    fenchel_transform,
    make_doob_factor,
    make_power,
    moments_from_tail,
    subgaussian_family_check,
    tail_from_psi,
)

# %% [markdown]
# ## The transform for `psi(p) = p^(1/m)`
#
# Setting the derivative of `p y - (p/m) ln p` to zero gives
# `p = e^(my-1)` and `h*(y) = e^(my-1)/m`.

# %%
y = np.linspace(1, 3, 5)
for m in (1, 2, 4):
    table = fenchel_transform(make_power(m), y, p_max=1e6)
    closed = np.exp(m * y - 1) / m
    print(f"m={m}: max rel err {np.max(np.abs(table.hstar / closed - 1)):.1e}",
          "argmax p:", np.round(table.argmax_p, 2))

# %% [markdown]
# Every table is nondecreasing and convex in `y`, and the maximiser stays
# inside the domain of `psi`:

# %%
table = fenchel_transform(make_doob_factor(), np.linspace(0.5, 4, 30))
print("violations:", table.invariant_violations() or "none")

# %% [markdown]
# ## Sub-gaussian and sub-exponential tails
#
# With `C = 1` the bound for `p^(1/m)` is exactly `exp(-t^m / (m e))`.

# %%
t = np.array([math.e, 4.0, 6.0, 10.0])
for m in (1, 2):
    print(f"m={m}", np.column_stack([t, tail_from_psi(make_power(m), 1.0, t), np.exp(-(t**m) / (m * math.e))]))

report = subgaussian_family_check(2)
print(f"estimated c(2) = {report.c_estimate:.6f}, 1/(2e) = {report.c_closed_form:.6f}, ok={report.ok}")

# %% [markdown]
# Below `t = C e` the bound is the trivial 1. Scaling `C` stretches the
# bound along `t`:

# %%
for c in (1.0, 2.0):
    print(f"C={c}:", tail_from_psi(make_power(2), c, np.array([1.0, 6.0, 12.0])))

# %% [markdown]
# ## Back to moments
#
# Integrating `p t^(p-1) T(t)` recovers moments from a tail. For `T = e^(-t)`
# this gives `Gamma(p+1)^(1/p)`; for the `m = 2` bound the recovered moments
# grow like `sqrt(p)` again, up to a constant.

# %%
class ExpTail:
    valid_from = 0.0

    def __call__(self, t):
        return math.exp(-t)


print([round(moments_from_tail(ExpTail(), p), 6) for p in (1, 2, 3)], [1, math.sqrt(2), 6 ** (1 / 3)])

bound = TailBound.from_psi(make_power(2), 1.0, t_max=100.0, n_y=96)
p = np.array([1.0, 4.0, 9.0, 16.0])
mu = np.array([moments_from_tail(bound, q) for q in p])
print("mu(p)/sqrt(p):", np.round(mu / np.sqrt(p), 4))
