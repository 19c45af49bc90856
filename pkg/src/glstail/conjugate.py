"""Young-Fenchel transform of h(p) = p ln psi(p) and the tail bounds it induces.

For a random variable with ``|zeta|_p <= C psi(p)`` on the domain of ``psi``,
Markov's inequality optimised over ``p`` gives

    P(|zeta| > t) <= exp(-h*(ln(t / C))),   t >= C e,

with ``h*(y) = sup_p (p y - h(p))``. Every number computed here is a lower
estimate of ``h*`` (a maximum over finitely many candidate ``p``), so the
resulting tail bounds err on the large, valid side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate

from ._io import write_csv
from ._search import golden_max
from .errors import DivergenceError, DomainError, NonFiniteError
from .psi_functions import P_MAX, GeneratingFunction, PDomain, make_power

__all__ = [
    "ConjugateTable",
    "TailBound",
    "SubGaussianReport",
    "h_of",
    "fenchel_transform",
    "tail_from_psi",
    "subgaussian_family_check",
    "moments_from_tail",
]

# Quadrature defaults for moments_from_tail.
QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-8
CUTOFF_FACTOR = 1e-16
CUTOFF_PANELS = 3
MAX_PANELS = 1000

# t within this relative distance below C e is treated as t = C e; the
# Markov-type bound exp(-h*(ln(t/C))) is valid for every t > 0 anyway.
THRESHOLD_RTOL = 1e-9
E_THRESHOLD = math.e * (1.0 - THRESHOLD_RTOL)


def h_of(psi: GeneratingFunction, p):
    """h(p) = p ln psi(p). Negative wherever psi < 1."""
    p_arr = np.asarray(p, dtype=float)
    out = p_arr * np.log(psi(p_arr))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ConjugateTable:
    """Gridded lower estimate of h*(y) with the maximising p for each y."""

    y_grid: np.ndarray
    hstar: np.ndarray
    argmax_p: np.ndarray
    source_domain: PDomain

    def invariant_violations(self, tol: float = 1e-9) -> list[str]:
        """Return descriptions of failed monotonicity/convexity/domain checks."""
        y, hs, ap = self.y_grid, self.hstar, self.argmax_p
        problems = []
        dec = np.nonzero(np.diff(hs) < 0)[0]
        if dec.size:
            problems.append(f"hstar decreases after y={y[dec[0]]!r}")
        if y.size >= 3:
            lam = (y[2:] - y[1:-1]) / (y[2:] - y[:-2])
            chord = lam * hs[:-2] + (1.0 - lam) * hs[2:]
            bad = np.nonzero(hs[1:-1] > chord + tol * (1.0 + np.abs(hs[1:-1])))[0]
            if bad.size:
                problems.append(f"hstar not convex at y={y[bad[0] + 1]!r}")
        dom = self.source_domain
        lo = dom.p_lo if dom.include_lo else dom.p_lo * (1.0 + 1e-12)
        if np.any((ap < lo) | (ap > dom.p_hi)):
            problems.append("argmax_p outside source domain")
        return problems

    def lower_bound(self, y):
        """Conservative h*(y) between and beyond grid nodes.

        Uses the supporting lines p_j* y - h(p_j*) of the neighbouring nodes,
        clipped to the node values; the result is nondecreasing in ``y`` and
        never exceeds the true h*.
        """
        y = np.asarray(y, dtype=float)
        yg, hs, ap = self.y_grid, self.hstar, self.argmax_p
        j = np.clip(np.searchsorted(yg, y, side="right") - 1, 0, yg.size - 1)
        k = np.minimum(j + 1, yg.size - 1)
        tan_left = hs[j] + ap[j] * (y - yg[j])
        tan_right = hs[k] + ap[k] * (y - yg[k])
        inside = (y >= yg[0]) & (y < yg[-1])
        val = np.where(inside, np.clip(np.maximum(tan_left, tan_right), hs[j], hs[k]), tan_left)
        # before the first node only the first supporting line is available
        val = np.where(y < yg[0], hs[0] + ap[0] * (y - yg[0]), val)
        return float(val) if val.ndim == 0 else val

    def to_csv(self, path: str | Path) -> Path:
        return write_csv(path, ("y", "hstar", "argmax_p"), (self.y_grid, self.hstar, self.argmax_p))


def fenchel_transform(
    psi: GeneratingFunction,
    y_grid,
    p_grid_size: int = 512,
    refine_iters: int = 64,
    p_max: float = P_MAX,
    p_grid=None,
) -> ConjugateTable:
    """Young-Fenchel transform h*(y) = sup_p (p y - p ln psi(p)).

    A log-spaced scan over ``p`` is followed by golden-section refinement on
    the bracket around the best scan point (``refine_iters=0`` disables it).
    The objective is not assumed concave, so the scan always runs and the
    refined value is only kept when it improves on the scan. A final pass
    lets each y reuse the maximiser of its left neighbour, which makes the
    table exactly nondecreasing.

    ``p_grid`` overrides the log grid with explicit points inside the domain.
    """
    y = np.asarray(y_grid, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y_grid must be a nonempty 1-d array")
    if np.any(np.diff(y) < 0) or not np.all(np.isfinite(y)):
        raise ValueError("y_grid must be finite and sorted ascending")
    if p_grid is None:
        if p_grid_size < 16:
            raise ValueError(f"p_grid_size must be >= 16, got {p_grid_size}")
        p = psi.domain.grid(p_grid_size, p_max)
    else:
        p = np.unique(np.asarray(p_grid, dtype=float))
    h = h_of(psi, p)
    if not np.all(np.isfinite(h)):
        bad = p[~np.isfinite(h)][0]
        raise NonFiniteError(f"h(p) is not finite at p={bad!r} for {psi.tag}")

    obj = np.outer(y, p) - h
    idx = np.argmax(obj, axis=1)
    rows = np.arange(y.size)
    best = obj[rows, idx]
    best_p = p[idx]
    best_h = h[idx]

    if refine_iters > 0 and p.size >= 2:
        a = p[np.maximum(idx - 1, 0)]
        b = p[np.minimum(idx + 1, p.size - 1)]

        def objective(q):
            return q * y - q * np.log(psi.func(q))

        q, val = golden_max(objective, a, b, refine_iters)
        better = val > best
        best = np.where(better, val, best)
        best_p = np.where(better, q, best_p)
        best_h = np.where(better, q * y - val, best_h)

    for i in range(1, y.size):
        cand = best_p[i - 1] * y[i] - best_h[i - 1]
        if cand > best[i]:
            best[i], best_p[i], best_h[i] = cand, best_p[i - 1], best_h[i - 1]

    return ConjugateTable(y.copy(), best, best_p, psi.domain)


@dataclass(frozen=True)
class TailBound:
    """t -> exp(-h*(ln(t/C))) for t >= C e, and 1 below that threshold."""

    table: ConjugateTable
    scale_C: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.scale_C < math.inf:
            raise ValueError(f"scale_C must be positive and finite, got {self.scale_C}")

    @property
    def valid_from(self) -> float:
        return self.scale_C * math.e

    @property
    def kinks(self) -> np.ndarray:
        """t values where the bound is not smooth: the threshold and every table node."""
        nodes = self.scale_C * np.exp(self.table.y_grid)
        return np.unique(np.concatenate([[self.valid_from], nodes[nodes >= self.valid_from]]))

    @classmethod
    def from_psi(
        cls,
        psi: GeneratingFunction,
        scale_C: float = 1.0,
        t_max: float | None = None,
        n_y: int = 256,
        **fenchel_kw,
    ) -> "TailBound":
        """Tabulate h* on ``n_y`` points of y in [1, ln(t_max/C)]."""
        y_hi = math.log(t_max / scale_C) if t_max is not None else 4.0
        y = np.linspace(1.0, max(y_hi, 1.0 + 1e-6), n_y)
        return cls(fenchel_transform(psi, y, **fenchel_kw), scale_C)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        x = t / self.scale_C
        active = x >= E_THRESHOLD
        y = np.log(np.where(active, x, math.e))
        out = np.where(active, np.exp(-np.asarray(self.table.lower_bound(y))), 1.0)
        out = np.clip(out, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def to_csv(self, path: str | Path, t) -> Path:
        t = np.asarray(t, dtype=float)
        return write_csv(path, ("t", "bound"), (t, np.atleast_1d(self(t))))


def tail_from_psi(
    psi: GeneratingFunction,
    scale_C: float,
    t,
    p_grid_size: int = 512,
    refine_iters: int = 64,
    p_max: float = P_MAX,
):
    """Bound on P(|zeta| > t) given |zeta|_p <= scale_C * psi(p).

    Returns 1 for t < scale_C * e (up to a relative 1e-9); otherwise
    exp(-h*(ln(t/scale_C))) with h* computed directly at each requested t.
    Array input is supported.
    """
    if not 0 < scale_C < math.inf:
        raise ValueError(f"scale_C must be positive and finite, got {scale_C}")
    t_arr = np.asarray(t, dtype=float)
    x = np.atleast_1d(t_arr / scale_C)
    out = np.ones_like(x)
    active = x >= E_THRESHOLD
    if np.any(active):
        ys, inverse = np.unique(np.log(x[active]), return_inverse=True)
        table = fenchel_transform(psi, ys, p_grid_size, refine_iters, p_max)
        out[active] = np.exp(-table.hstar)[inverse]
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)


@dataclass
class SubGaussianReport:
    m: float
    t: np.ndarray
    bound: np.ndarray
    closed_form: np.ndarray
    rel_err: np.ndarray
    c_estimate: float
    c_closed_form: float
    rel_tol: float
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def subgaussian_family_check(m: float, t_grid=None, rel_tol: float = 1e-3, **fenchel_kw) -> SubGaussianReport:
    """Check that psi(p) = p**(1/m) yields the tail exp(-t**m / (m e)).

    The stationary point of p y - (p/m) ln p is p = exp(m y - 1), giving
    h*(y) = exp(m y - 1)/m and hence c(m) = 1/(m e). The constant is also
    recovered from the numerical bounds as min_t -ln(bound)/t**m. Deviations
    beyond ``rel_tol`` are listed in the report, not raised.
    """
    if not m > 0:
        raise ValueError(f"m must be positive, got {m}")
    t = np.linspace(math.e, 10.0, 64) if t_grid is None else np.asarray(t_grid, dtype=float)
    p_max = fenchel_kw.pop("p_max", max(P_MAX, 10.0 * float(np.max(t)) ** m))
    psi = make_power(m, PDomain())
    # exp(-h*(ln t)) at every requested t, including t < e where the
    # stationary-point identity still holds as long as t**m >= e
    ys, inverse = np.unique(np.log(t), return_inverse=True)
    table = fenchel_transform(psi, ys, p_max=p_max, **fenchel_kw)
    bound = np.exp(-table.hstar)[inverse]
    c_closed = 1.0 / (m * math.e)
    closed = np.exp(-c_closed * t**m)
    rel = np.abs(bound - closed) / closed
    c_est = float(np.min(-np.log(bound) / t**m))
    report = SubGaussianReport(m, t, bound, closed, rel, c_est, c_closed, rel_tol)
    if np.any(t < math.e):
        report.notes.append("some t lie below e, outside the range where the tail bound is asserted")
    for ti, r in zip(t, rel):
        if r > rel_tol:
            report.violations.append(f"t={ti:.6g}: relative error {r:.3g} > {rel_tol:g}")
    if abs(c_est - c_closed) > rel_tol * c_closed:
        report.violations.append(f"c(m) estimate {c_est:.6g} differs from 1/(m e) = {c_closed:.6g}")
    return report


def moments_from_tail(
    tail: Callable[[float], float],
    p: float,
    abs_tol: float = QUAD_ABS_TOL,
    rel_tol: float = QUAD_REL_TOL,
    max_panels: int = MAX_PANELS,
    breakpoints=(),
) -> float:
    """|zeta|_p from its tail function: (int_0^inf p t^(p-1) T(t) dt)^(1/p).

    Integrates over the panels [0,1], [1,2], [2,4], ... with adaptive
    Gauss-Kronrod quadrature. Stops once the integrand at the panel end falls
    below 1e-16 times the running integral and the panel mass is negligible
    for three consecutive panels; raises :class:`DivergenceError` otherwise.
    Known kinks of the tail (``breakpoints``, plus ``tail.kinks`` when
    present) are passed to the quadrature.
    """
    if not p >= 1:
        raise DomainError(f"moment order must be >= 1, got {p}")

    def integrand(t):
        return p * t ** (p - 1.0) * tail(t) if t > 0 else (p * tail(0.0) if p == 1 else 0.0)

    kinks = np.unique(np.concatenate([np.ravel(breakpoints), np.ravel(getattr(tail, "kinks", ()))]).astype(float))
    total = err_total = 0.0
    quiet = 0
    a, b = 0.0, 1.0
    for _ in range(max_panels):
        try:
            inner = kinks[(kinks > a) & (kinks < b)]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, err = integrate.quad(
                    integrand, a, b, epsabs=max(abs_tol, rel_tol * total), epsrel=rel_tol,
                    limit=200 + 2 * inner.size, points=inner if inner.size else None,
                )
            f_end = integrand(b)
        except OverflowError:
            break
        err_total += err
        if not math.isfinite(val):
            raise DivergenceError(f"non-finite panel integral on [{a}, {b}]")
        total += val
        if f_end <= CUTOFF_FACTOR * total and val <= max(abs_tol, rel_tol * total):
            quiet += 1
            if quiet >= CUTOFF_PANELS:
                if err_total > 100.0 * max(abs_tol, rel_tol * total):
                    warnings.warn(
                        f"moment integral of order {p}: error estimate {err_total:.3g} "
                        f"exceeds tolerance on {total:.6g}", integrate.IntegrationWarning, stacklevel=2,
                    )
                return total ** (1.0 / p)
        else:
            quiet = 0
        a, b = b, 2.0 * b
        if math.isinf(b):
            break
    raise DivergenceError(
        f"moment integral of order {p} has not converged by t={a:.3g}; "
        "the tail must decay faster than t^-(p+1)"
    )
