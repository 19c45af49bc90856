"""Generating functions psi(p) on sub-intervals of the moment-index axis [1, inf].

A generating function is a positive function of the moment index ``p``. It
defines a Grand Lebesgue Space through the norm ``sup_p |zeta|_p / psi(p)``
and, through its Young-Fenchel transform, an exponential tail bound.

All grid operations over ``p`` use logarithmically spaced points. Infinite
upper ends are truncated at ``P_MAX`` and excluded endpoints are nudged
inward by a relative offset of ``NUDGE`` so they are never evaluated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, NonFiniteError

__all__ = [
    "P_MAX",
    "NUDGE",
    "PDomain",
    "GeneratingFunction",
    "GridSup",
    "log_grid",
    "make_power",
    "make_doob_factor",
    "make_constant",
    "from_table",
    "load_table",
    "combine",
    "dominance_constant",
]

#: Truncation cap for infinite upper ends of p-domains.
P_MAX: float = 1e3

#: Relative inward offset applied to excluded endpoints before evaluation.
NUDGE: float = 1e-9


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Return ``n`` points equi-spaced in ``ln p`` with exact endpoints."""
    if n < 2:
        raise ValueError(f"grid needs at least 2 points, got {n}")
    if not (0 < lo < hi < math.inf):
        raise DomainError(f"cannot grid [{lo}, {hi}]")
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), n))
    grid[0] = lo
    grid[-1] = hi
    return grid


@dataclass(frozen=True)
class PDomain:
    """An interval of moment indices inside ``[1, inf]``."""

    p_lo: float = 1.0
    p_hi: float = math.inf
    include_lo: bool = True
    include_hi: bool = False

    def __post_init__(self) -> None:
        if math.isnan(self.p_lo) or math.isnan(self.p_hi):
            raise DomainError("domain endpoints must not be NaN")
        if not (1.0 <= self.p_lo < self.p_hi):
            raise DomainError(f"need 1 <= p_lo < p_hi, got [{self.p_lo}, {self.p_hi}]")
        if math.isinf(self.p_hi) and self.include_hi:
            raise DomainError("an infinite upper end cannot be included")

    @classmethod
    def closed(cls, lo: float, hi: float) -> "PDomain":
        return cls(lo, hi, True, True)

    def __str__(self) -> str:
        left = "[" if self.include_lo else "("
        right = "]" if self.include_hi else ")"
        return f"{left}{self.p_lo:g}, {self.p_hi:g}{right}"

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        above = p >= self.p_lo if self.include_lo else p > self.p_lo
        below = p <= self.p_hi if self.include_hi else p < self.p_hi
        return above & below

    def eval_bounds(self, p_max: float = P_MAX) -> tuple[float, float]:
        """Finite, evaluable endpoints: excluded ends nudged, infinite end capped."""
        lo = self.p_lo if self.include_lo else self.p_lo * (1.0 + NUDGE)
        if math.isinf(self.p_hi):
            hi = float(p_max)
        else:
            hi = self.p_hi if self.include_hi else self.p_hi * (1.0 - NUDGE)
        if not hi > lo:
            raise DomainError(f"domain {self} is empty after truncation at p_max={p_max:g}")
        return lo, hi

    def grid(self, n: int, p_max: float = P_MAX) -> np.ndarray:
        return log_grid(*self.eval_bounds(p_max), n)

    def intersect(self, other: "PDomain") -> "PDomain":
        if self.p_lo > other.p_lo:
            lo, inc_lo = self.p_lo, self.include_lo
        elif self.p_lo < other.p_lo:
            lo, inc_lo = other.p_lo, other.include_lo
        else:
            lo, inc_lo = self.p_lo, self.include_lo and other.include_lo
        if self.p_hi < other.p_hi:
            hi, inc_hi = self.p_hi, self.include_hi
        elif self.p_hi > other.p_hi:
            hi, inc_hi = other.p_hi, other.include_hi
        else:
            hi, inc_hi = self.p_hi, self.include_hi and other.include_hi
        if not lo < hi:
            raise DomainError(f"domains {self} and {other} do not overlap on an interval")
        return PDomain(lo, hi, inc_lo, inc_hi)


@dataclass(frozen=True)
class GeneratingFunction:
    """A positive function of ``p`` on a :class:`PDomain`.

    ``func`` receives a float ndarray and must return an array of the same
    shape. Calling the object validates the query against the domain.
    """

    domain: PDomain
    func: Callable[[np.ndarray], np.ndarray]
    tag: str = ""

    def __call__(self, p):
        arr = np.asarray(p, dtype=float)
        inside = self.domain.contains(arr)
        if not np.all(inside):
            bad = arr[~inside] if arr.ndim else arr
            raise DomainError(f"{self.tag or 'psi'}: p={np.ravel(bad)[0]!r} outside {self.domain}")
        out = np.asarray(self.func(arr), dtype=float)
        if np.any(~(out > 0)):
            raise NonFiniteError(f"{self.tag or 'psi'}: non-positive or NaN value")
        return float(out) if out.ndim == 0 else out

    def __repr__(self) -> str:
        return f"GeneratingFunction({self.tag!r} on {self.domain})"


class GridSup(NamedTuple):
    value: float
    p: float


def make_power(m: float, domain: PDomain | None = None) -> GeneratingFunction:
    """psi(p) = p**(1/m), the sub-Gaussian type family (m=2 is Gaussian)."""
    if not m > 0 or math.isinf(m):
        raise ValueError(f"power exponent m must be positive and finite, got {m}")
    inv = 1.0 / m
    return GeneratingFunction(domain or PDomain(), lambda p: np.power(p, inv), f"power({m:g})")


def make_doob_factor(domain: PDomain | None = None) -> GeneratingFunction:
    """The Doob maximal factor p/(p-1); p = 1 must be excluded."""
    domain = domain or PDomain(1.0, math.inf, False, False)
    if domain.p_lo == 1.0 and domain.include_lo:
        raise DomainError("Doob factor p/(p-1) is infinite at p=1; exclude it from the domain")
    return GeneratingFunction(domain, lambda p: p / (p - 1.0), "doob")


def make_constant(c: float, domain: PDomain | None = None) -> GeneratingFunction:
    if not 0 < c < math.inf:
        raise ValueError(f"constant must be positive and finite, got {c}")
    c = float(c)
    return GeneratingFunction(domain or PDomain(), lambda p: np.full(np.shape(p), c), f"const({c:g})")


def from_table(p, values, tag: str = "table") -> GeneratingFunction:
    """Tabulated function, interpolated piecewise-linearly in (ln p, ln psi).

    The domain is the closed hull of the tabulated ``p`` values.
    """
    p = np.asarray(p, dtype=float)
    values = np.asarray(values, dtype=float)
    if p.ndim != 1 or p.shape != values.shape or p.size < 2:
        raise ValueError("table needs two equal-length 1-d columns with at least 2 rows")
    order = np.argsort(p, kind="stable")
    p, values = p[order], values[order]
    if np.any(np.diff(p) <= 0):
        raise ValueError("table p values must be distinct")
    if not np.all(np.isfinite(values) & (values > 0)):
        raise NonFiniteError("table values must be positive and finite")
    lp, lv = np.log(p), np.log(values)

    def func(q):
        return np.exp(np.interp(np.log(q), lp, lv))

    return GeneratingFunction(PDomain.closed(p[0], p[-1]), func, tag)


def load_table(path: str | Path) -> GeneratingFunction:
    """Read a two-column CSV with header ``p,value``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"p", "value"} <= set(rows[0]):
        raise ValueError(f"{path}: expected CSV header 'p,value'")
    return from_table([float(r["p"]) for r in rows], [float(r["value"]) for r in rows], f"table({path})")


def combine(
    f: GeneratingFunction,
    g: GeneratingFunction | None = None,
    mode: str = "product",
    c: float | None = None,
) -> GeneratingFunction:
    """Pointwise combination on the intersected domain.

    ``mode`` is ``"product"`` (f*g), ``"min"`` (pointwise minimum of f and g)
    or ``"scale"`` (c*f; ``g`` must be omitted).
    """
    if mode == "scale":
        if g is not None:
            raise ValueError("scale mode takes a single function")
        if c is None or not 0 < c < math.inf:
            raise ValueError(f"scale factor must be positive and finite, got {c}")
        ff, cc = f.func, float(c)
        return GeneratingFunction(f.domain, lambda p: cc * ff(p), f"scale({cc:g}, {f.tag})")
    if g is None:
        raise ValueError(f"mode {mode!r} needs two functions")
    domain = f.domain.intersect(g.domain)
    ff, gf = f.func, g.func
    if mode == "product":
        return GeneratingFunction(domain, lambda p: ff(p) * gf(p), f"product[{f.tag}, {g.tag}]")
    if mode == "min":
        return GeneratingFunction(domain, lambda p: np.minimum(ff(p), gf(p)), f"min[{f.tag}, {g.tag}]")
    raise ValueError(f"unknown combine mode {mode!r}")


def dominance_constant(
    nu1: GeneratingFunction,
    nu2: GeneratingFunction,
    grid_size: int = 256,
    p_max: float = P_MAX,
) -> GridSup:
    """Grid estimate of C = sup_p nu1(p)/nu2(p) over the common domain.

    The grid supremum never exceeds the true one. The maximizing ``p`` is
    returned so callers can spot a boundary maximum.
    """
    p = nu1.domain.intersect(nu2.domain).grid(grid_size, p_max)
    ratio = nu1(p) / nu2(p)
    if not np.all(np.isfinite(ratio)):
        raise NonFiniteError(f"non-finite ratio {nu1.tag}/{nu2.tag} on the grid")
    i = int(np.argmax(ratio))
    return GridSup(float(ratio[i]), float(p[i]))
