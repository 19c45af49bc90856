"""Moment-transfer engine.

Starting from an inequality ``|xi|_p <= g(p, r, |eta|_r)`` valid for
``(p, r)`` in a domain ``D``, this module builds the generating function

    psi(p) = inf_{r in R(p)}  g(p,  r, |eta|_r)     for p >  p0
    psi(p) = inf_{r in R(p0)} g(p0, r, |eta|_r)     for p <= p0

which dominates ``|xi|_p``. The linear case ``g = v(p, r) z`` with a moment
profile ``beta`` gives ``tau(p) = inf_r v(p, r) beta(r)``; the power case
``g = v1(p, r) z**alpha`` gives ``inf_r v1(p, r) beta(r)**alpha``.

``D`` is represented slice-wise: the kernel maps each admissible ``p`` to an
interval :class:`PDomain` or to a finite set of ``r`` values.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._search import golden_max
from .errors import DomainError, EmptySliceError, NonFiniteError
from .moments import MomentOracle
from .psi_functions import NUDGE, P_MAX, GeneratingFunction, PDomain, from_table

__all__ = [
    "TransferKernel",
    "SliceInf",
    "NonFiniteSliceWarning",
    "doob_kernel",
    "bdg_kernel",
    "constant_kernel",
    "load_custom_kernel",
    "psi_from_kernel",
    "tau_linear",
    "power_transfer",
    "build_psi_function",
]

R_GRID_SIZE = 256
REFINE_ITERS = 64

Slice = PDomain | np.ndarray


class NonFiniteSliceWarning(RuntimeWarning):
    """Every candidate r in a slice gave a non-finite value; psi is +inf there."""


class SliceInf(NamedTuple):
    value: float
    r: float


@dataclass(frozen=True)
class TransferKernel:
    """The function g(p, r, z) together with its slice-shaped domain.

    ``form`` is ``"linear"`` (g = factor(p, r) z), ``"power"``
    (g = factor(p, r) z**alpha) or ``"general"`` (g given directly).
    ``factor`` and ``g`` receive a scalar ``p`` and an array of ``r``.
    """

    p_domain: PDomain
    r_slice: Callable[[float], Slice | Sequence[float]]
    form: str = "linear"
    factor: Callable[[float, np.ndarray], np.ndarray] | None = None
    alpha: float = 1.0
    g: Callable[[float, np.ndarray, np.ndarray], np.ndarray] | None = None
    p0: float | None = None
    tag: str = "kernel"
    alpha_of: Callable[[float, np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.form not in ("linear", "power", "general"):
            raise ValueError(f"unknown kernel form {self.form!r}")
        if self.form == "general":
            if self.g is None:
                raise ValueError("a general kernel needs g(p, r, z)")
        elif self.factor is None:
            raise ValueError(f"a {self.form} kernel needs a factor v(p, r)")
        if self.form == "linear" and self.alpha != 1.0:
            raise ValueError("a linear kernel has alpha = 1")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.p0 is not None and not self.in_u(self.p0):
            raise DomainError(f"p0={self.p0} is not in U={self.p_domain}")

    def in_u(self, p: float) -> bool:
        return bool(self.p_domain.contains(p))

    @property
    def default_p0(self) -> float:
        """p0 if given, else the infimum of U (nudged inward when excluded)."""
        if self.p0 is not None:
            return float(self.p0)
        d = self.p_domain
        return d.p_lo if d.include_lo else d.p_lo * (1.0 + NUDGE)

    def slice_at(self, p: float) -> Slice:
        if not self.in_u(p):
            raise EmptySliceError(f"R({p}) is empty: p is outside U={self.p_domain}")
        sl = self.r_slice(p)
        if isinstance(sl, PDomain):
            return sl
        arr = np.unique(np.asarray(sl, dtype=float))
        if arr.size == 0:
            raise EmptySliceError(f"R({p}) is empty")
        if np.any(arr < 1):
            raise DomainError(f"R({p}) contains r < 1")
        return arr

    def __call__(self, p: float, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.form == "general":
            return np.asarray(self.g(p, r, z), dtype=float)
        v = np.asarray(self.factor(p, r), dtype=float)
        if self.form == "linear":
            return v * z
        alpha = self.alpha if self.alpha_of is None else np.asarray(self.alpha_of(p, r), dtype=float)
        return v * np.power(z, alpha)

    def monotonicity_violations(self, n: int = 200, seed: int = 0, z_max: float = 100.0) -> int:
        """Spot-check that g is nondecreasing in z on random (p, r, z1 < z2)."""
        rng = np.random.default_rng(seed)
        lo, hi = self.p_domain.eval_bounds(min(P_MAX, 64.0) if math.isinf(self.p_domain.p_hi) else P_MAX)
        bad = 0
        for p in np.exp(rng.uniform(math.log(lo), math.log(hi), n)):
            try:
                sl = self.slice_at(float(p))
            except EmptySliceError:
                continue
            if isinstance(sl, PDomain):
                a, b = sl.eval_bounds(P_MAX)
                r = np.array([np.exp(rng.uniform(math.log(a), math.log(b)))])
            else:
                r = rng.choice(sl, size=1)
            z = np.sort(rng.uniform(0.0, z_max, 2))
            g1, g2 = self(float(p), r, z[:1]), self(float(p), r, z[1:])
            bad += int(np.any(g1 > g2 * (1 + 1e-12)))
        return bad


def doob_kernel(p0: float | None = None) -> TransferKernel:
    """|M*|_p <= p/(p-1) |eps_n|_p for p > 1, i.e. R(p) = {p}."""
    return TransferKernel(
        PDomain(1.0, math.inf, False, False),
        lambda p: np.array([p]),
        "linear",
        factor=lambda p, r: np.full(np.shape(r), p / (p - 1.0)),
        p0=p0,
        tag="doob",
    )


def bdg_kernel(p0: float | None = None) -> TransferKernel:
    """|M*|_p <= sqrt(e) |<M,M>|_{p/2}^{1/2} for p >= 2, i.e. R(p) = {p/2}."""
    root_e = math.sqrt(math.e)
    return TransferKernel(
        PDomain(2.0, math.inf, True, False),
        lambda p: np.array([p / 2.0]),
        "power",
        factor=lambda p, r: np.full(np.shape(r), root_e),
        alpha=0.5,
        p0=p0,
        tag="bdg",
    )


def constant_kernel(c: float, domain: PDomain | None = None) -> TransferKernel:
    """g(p, r, z) = c with R(p) = {p}; useful as a degenerate test kernel."""
    return TransferKernel(
        domain or PDomain(),
        lambda p: np.array([p]),
        "general",
        g=lambda p, r, z: np.full(np.broadcast(r, z).shape, float(c)),
        tag=f"const({c:g})",
    )


def load_custom_kernel(path: str | Path, p0: float | None = None) -> TransferKernel:
    """Discrete kernel from a CSV with columns ``p,r,factor,alpha``.

    Each row contributes the point (p, r) to D with g = factor * z**alpha.
    """
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    need = {"p", "r", "factor", "alpha"}
    if not rows or not need <= set(rows[0]):
        raise ValueError(f"{path}: expected CSV header p,r,factor,alpha")
    table: dict[float, list[tuple[float, float, float]]] = {}
    for row in rows:
        p, r, v, a = (float(row[k]) for k in ("p", "r", "factor", "alpha"))
        if p < 1 or r < 1:
            raise DomainError(f"{path}: (p, r) = ({p}, {r}) outside [1, inf)^2")
        if v < 0 or not a > 0:
            raise ValueError(f"{path}: factor must be >= 0 and alpha > 0")
        table.setdefault(p, []).append((r, v, a))
    keys = np.array(sorted(table))

    def lookup(p: float) -> list[tuple[float, float, float]]:
        i = int(np.argmin(np.abs(keys - p)))
        if not math.isclose(keys[i], p, rel_tol=1e-12, abs_tol=0.0):
            return []
        return table[float(keys[i])]

    def r_slice(p):
        return np.array([r for r, _, _ in lookup(p)])

    def column(p, r, idx):
        entries = {rr: e for rr, *e in lookup(p)}
        return np.array([entries[float(x)][idx] for x in np.ravel(r)]).reshape(np.shape(r))

    lo, hi = float(keys[0]), float(keys[-1])
    domain = PDomain.closed(lo, hi) if hi > lo else PDomain.closed(lo, math.nextafter(lo, math.inf))
    return TransferKernel(
        domain,
        r_slice,
        "power",
        factor=lambda p, r: column(p, r, 0),
        alpha_of=lambda p, r: column(p, r, 1),
        p0=p0 if p0 is not None else lo,
        tag=f"custom({path})",
    )


def _slice_inf(
    objective: Callable[[np.ndarray], np.ndarray],
    sl: Slice,
    r_grid_size: int = R_GRID_SIZE,
    refine_iters: int = REFINE_ITERS,
    p_max: float = P_MAX,
) -> SliceInf:
    """Infimum of ``objective`` over a slice; ties go to the smallest r.

    Discrete slices are searched exhaustively; interval slices by a log grid
    followed by golden-section refinement around the best grid point.
    Non-finite candidates are skipped.
    """
    if isinstance(sl, PDomain):
        r = sl.grid(r_grid_size, p_max)
    else:
        r = np.unique(np.asarray(sl, dtype=float))
    with np.errstate(invalid="ignore", over="ignore"):
        vals = np.asarray(objective(r), dtype=float)
    vals = np.where(np.isfinite(vals), vals, np.inf)
    if np.all(np.isinf(vals)):
        return SliceInf(math.inf, math.nan)
    i = int(np.argmin(vals))
    best, best_r = float(vals[i]), float(r[i])
    if isinstance(sl, PDomain) and refine_iters > 0 and r.size >= 2:
        a = r[max(i - 1, 0): max(i - 1, 0) + 1]
        b = r[min(i + 1, r.size - 1): min(i + 1, r.size - 1) + 1]

        def neg(x):
            with np.errstate(invalid="ignore", over="ignore"):
                v = np.asarray(objective(x), dtype=float)
            return np.where(np.isfinite(v), -v, -np.inf)

        q, v = golden_max(neg, a, b, refine_iters)
        if -float(v[0]) < best:
            best, best_r = -float(v[0]), float(q[0])
    return SliceInf(best, best_r)


def _kernel_inf(kernel: TransferKernel, eta: MomentOracle, p: float, p0: float | None, **search) -> SliceInf:
    p0 = kernel.default_p0 if p0 is None else float(p0)
    if not kernel.in_u(p0):
        raise DomainError(f"p0={p0} is not in U={kernel.p_domain}")
    if p > p0:
        first = p
    elif p >= 1:
        first = p0
    else:
        raise DomainError(f"p={p} < 1")
    sl = kernel.slice_at(first)

    def objective(r):
        return kernel(first, r, eta(r))

    res = _slice_inf(objective, sl, **search)
    if math.isinf(res.value):
        warnings.warn(f"psi({p}) = +inf: {eta.label} is non-finite on all of R({first})", NonFiniteSliceWarning, stacklevel=3)
    return res


def psi_from_kernel(kernel: TransferKernel, eta: MomentOracle, p: float, p0: float | None = None, **search) -> float:
    """psi_{p0}[eta](p), an upper bound for |xi|_p.

    Above ``p0`` the slice R(p) is searched with first argument ``p``. At or
    below ``p0`` the value at ``p0`` is returned: by Lyapunov's inequality
    |xi|_p <= |xi|_{p0} there, so psi is flat on [1, p0].
    """
    return _kernel_inf(kernel, eta, float(p), p0, **search).value


def power_transfer(
    v1: Callable[[float, np.ndarray], np.ndarray],
    alpha: float,
    beta: GeneratingFunction,
    p: float,
    r_slice: Slice | Sequence[float],
    **search,
) -> float:
    """inf_r v1(p, r) beta(r)**alpha, so that |xi|_p <= this * ||eta||^alpha."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    sl = r_slice if isinstance(r_slice, PDomain) else np.unique(np.asarray(r_slice, dtype=float))

    def objective(r):
        inside = beta.domain.contains(r)
        b = np.full(np.shape(r), np.inf)
        b[inside] = beta.func(r[inside])
        return np.asarray(v1(p, r), dtype=float) * np.power(b, alpha)

    return _slice_inf(objective, sl, **search).value


def tau_linear(
    v: Callable[[float, np.ndarray], np.ndarray],
    beta: GeneratingFunction,
    p: float,
    r_slice: Slice | Sequence[float],
    **search,
) -> float:
    """tau(p) = inf_r v(p, r) beta(r); then ||xi||G tau <= ||eta||G beta."""
    return power_transfer(v, 1.0, beta, p, r_slice, **search)


def build_psi_function(
    kernel: TransferKernel,
    eta: MomentOracle,
    p_grid,
    p0: float | None = None,
    **search,
) -> GeneratingFunction:
    """Tabulate psi_{p0}[eta] on ``p_grid`` as a log-log interpolated function."""
    p_grid = np.unique(np.asarray(p_grid, dtype=float))
    if p_grid.size < 2:
        raise ValueError("p_grid needs at least two distinct points")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonFiniteSliceWarning)
        vals = np.array([psi_from_kernel(kernel, eta, float(p), p0, **search) for p in p_grid])
    if not np.all(np.isfinite(vals)):
        bad = p_grid[~np.isfinite(vals)][0]
        raise NonFiniteError(f"psi is infinite at p={bad!r}")
    return from_table(p_grid, vals, tag=f"psi[{kernel.tag}, {eta.label}]")
