"""Moment oracles, Grand Lebesgue Space norms and empirical tail checks.

A :class:`MomentOracle` is the map ``p -> |zeta|_p = (E|zeta|^p)^(1/p)``,
either in closed form or estimated from an :class:`EmpiricalSample`. The GLS
norm of ``zeta`` with generating function ``kappa`` is
``sup_p |zeta|_p / kappa(p)``, estimated here as a supremum over a log grid
in ``p`` (which can only underestimate the true value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import gammaln

from ._io import read_column, write_csv
from .errors import DomainError, NonFiniteError
from .psi_functions import P_MAX, GeneratingFunction, GridSup, PDomain, log_grid

__all__ = [
    "MomentOracle",
    "EmpiricalSample",
    "MomentEstimate",
    "TailEstimate",
    "DominanceReport",
    "constant_oracle",
    "rademacher_oracle",
    "gaussian_oracle",
    "exponential_oracle",
    "uniform_oracle",
    "sample_oracle",
    "function_oracle",
    "empirical_moment",
    "empirical_tail",
    "gls_norm",
    "natural_function",
    "check_tail_dominance",
]


class MomentEstimate(NamedTuple):
    value: float
    stderr: float


class TailEstimate(NamedTuple):
    fraction: np.ndarray | float
    stderr: np.ndarray | float


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted absolute outcomes of a simulation, with RNG provenance."""

    values: np.ndarray
    seed_info: str = ""

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("a sample needs at least one value")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("sample values must be finite and nonnegative")
        if np.any(np.diff(v) < 0):
            v = np.sort(v, kind="stable")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_outcomes(cls, outcomes, seed_info: str = "") -> "EmpiricalSample":
        """Build from signed outcomes by taking absolute values."""
        return cls(np.abs(np.asarray(outcomes, dtype=float)), seed_info)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def scaled(self, c: float) -> "EmpiricalSample":
        return EmpiricalSample(self.values * c, self.seed_info)

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.values, q))

    def to_csv(self, path: str | Path) -> Path:
        return write_csv(path, ("value",), (self.values,))

    @classmethod
    def load_csv(cls, path: str | Path) -> "EmpiricalSample":
        return cls(np.abs(np.array(read_column(path, "value"))), f"file:{path}")


def empirical_moment(s: EmpiricalSample, p: float) -> MomentEstimate:
    """Plug-in ``((1/n) sum v_i^p)^(1/p)`` with a jackknife standard error.

    The power mean is accumulated in log space so large ``p`` does not
    overflow. The standard error is NaN for a single observation.
    """
    if not p >= 1:
        raise DomainError(f"moment order must be >= 1, got {p}")
    v = s.values
    n = v.size
    if v[0] == v[-1]:
        return MomentEstimate(float(v[0]), 0.0)
    pos = v > 0
    lv = np.log(v[pos])
    a = p * lv
    top = a.max()
    w = np.zeros(n)
    w[pos] = np.exp(a - top)
    total = w.sum()
    value = math.exp((top + math.log(total) - math.log(n)) / p)
    if not math.isfinite(value):
        raise NonFiniteError(f"moment of order {p} overflowed")
    if n == 1:
        return MomentEstimate(value, math.nan)
    with np.errstate(divide="ignore"):
        loo = np.exp((top + np.log(np.maximum(total - w, 0.0) / (n - 1))) / p)
    stderr = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return MomentEstimate(value, stderr)


def empirical_tail(s: EmpiricalSample, t) -> TailEstimate:
    """Fraction of the sample strictly above ``t`` and its binomial stderr."""
    t = np.asarray(t, dtype=float)
    above = s.n - np.searchsorted(s.values, t, side="right")
    frac = above / s.n
    se = np.sqrt(frac * (1.0 - frac) / s.n)
    if frac.ndim == 0:
        return TailEstimate(float(frac), float(se))
    return TailEstimate(frac, se)


@dataclass(frozen=True)
class MomentOracle:
    """p -> |zeta|_p for p >= 1; infinite from ``finite_up_to`` on."""

    func: Callable[[np.ndarray], np.ndarray]
    kind: str = "analytic"
    finite_up_to: float = math.inf
    label: str = ""
    sample: EmpiricalSample | None = field(default=None, compare=False)

    def __call__(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(arr < 1):
            raise DomainError(f"{self.label}: moment order below 1")
        out = np.asarray(self.func(arr), dtype=float)
        out = np.where(arr >= self.finite_up_to, np.inf, out)
        return float(out) if out.ndim == 0 else out

    @property
    def domain(self) -> PDomain:
        return PDomain(1.0, self.finite_up_to, True, False)

    def scaled(self, c: float) -> "MomentOracle":
        """Oracle of c*zeta."""
        if not c > 0:
            raise ValueError("scale must be positive")
        f = self.func
        sample = self.sample.scaled(c) if self.sample is not None else None
        return MomentOracle(lambda p: c * f(p), self.kind, self.finite_up_to, f"{c:g}*{self.label}", sample)

    def stderr(self, p) -> float:
        if self.sample is None:
            return 0.0
        return empirical_moment(self.sample, float(p)).stderr


def constant_oracle(c: float) -> MomentOracle:
    """|zeta| = c almost surely."""
    if c < 0:
        raise ValueError("constant must be nonnegative")
    c = float(c)
    return MomentOracle(lambda p: np.full(np.shape(p), c), "analytic", math.inf, f"const({c:g})")


def rademacher_oracle() -> MomentOracle:
    oracle = constant_oracle(1.0)
    return MomentOracle(oracle.func, "analytic", math.inf, "rademacher")


def gaussian_oracle(sigma: float = 1.0) -> MomentOracle:
    """|N(0, sigma^2)|_p = sigma (2^(p/2) Gamma((p+1)/2) / sqrt(pi))^(1/p)."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")

    def f(p):
        log_mp = 0.5 * p * math.log(2.0) + gammaln((p + 1.0) / 2.0) - 0.5 * math.log(math.pi)
        return sigma * np.exp(log_mp / p)

    return MomentOracle(f, "analytic", math.inf, f"gaussian({sigma:g})")


def exponential_oracle(rate: float = 1.0) -> MomentOracle:
    """|Exp(rate)|_p = Gamma(p+1)^(1/p) / rate."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    return MomentOracle(lambda p: np.exp(gammaln(p + 1.0) / p) / rate, "analytic", math.inf, f"exponential({rate:g})")


def uniform_oracle(a: float = 1.0) -> MomentOracle:
    """|U(-a, a)|_p = a / (p+1)^(1/p)."""
    if not a > 0:
        raise ValueError("half-width must be positive")
    return MomentOracle(lambda p: a * np.power(p + 1.0, -1.0 / p), "analytic", math.inf, f"uniform({a:g})")


def sample_oracle(s: EmpiricalSample, label: str = "sample") -> MomentOracle:
    def f(p):
        flat = [empirical_moment(s, float(q)).value for q in np.ravel(p)]
        return np.reshape(np.array(flat, dtype=float), np.shape(p))

    return MomentOracle(f, "sample", math.inf, label, s)


def function_oracle(beta: GeneratingFunction) -> MomentOracle:
    """Treat a generating function as a moment profile, e.g. beta in |eta|_r <= beta(r)."""
    lo = beta.domain.p_lo
    if lo > 1:
        raise DomainError("a moment profile must be defined from p=1")
    dom = beta.domain
    upper = math.nextafter(dom.p_hi, math.inf) if dom.include_hi else dom.p_hi
    return MomentOracle(beta.func, "analytic", upper, beta.tag)


def _norm_grid(domain: PDomain, grid, p_max: float) -> np.ndarray:
    if np.ndim(grid) == 0:
        return domain.grid(int(grid), p_max)
    p = np.asarray(grid, dtype=float)
    if not np.all(domain.contains(p)):
        raise DomainError(f"explicit grid leaves {domain}")
    return p


def gls_norm(oracle: MomentOracle, kappa: GeneratingFunction, grid=256, p_max: float = P_MAX) -> GridSup:
    """Grid estimate of ||zeta||G kappa = sup_p |zeta|_p / kappa(p).

    ``grid`` is a point count for a log grid on the common domain, or an
    explicit array of ``p`` values. Returns the supremum and its location.
    """
    domain = kappa.domain.intersect(oracle.domain)
    p = _norm_grid(domain, grid, p_max)
    ratio = oracle(p) / kappa(p)
    if not np.all(np.isfinite(ratio)):
        raise NonFiniteError(f"non-finite ratio {oracle.label}/{kappa.tag} on the grid")
    i = int(np.argmax(ratio))
    return GridSup(float(ratio[i]), float(p[i]))


def natural_function(oracle: MomentOracle, domain: PDomain | None = None) -> GeneratingFunction:
    """kappa_0(p) = |zeta|_p, the generating function for which the norm is 1."""
    domain = domain or oracle.domain
    if np.isfinite(oracle.finite_up_to) and (domain.p_hi > oracle.finite_up_to or domain.include_hi and domain.p_hi == oracle.finite_up_to):
        raise DomainError(f"oracle {oracle.label} is infinite inside {domain}")
    probe = oracle(domain.grid(32, p_max=P_MAX))
    if not np.all(np.isfinite(probe) & (probe > 0)):
        raise NonFiniteError(f"oracle {oracle.label} is not positive and finite on {domain}")
    return GeneratingFunction(domain, oracle.func, f"natural[{oracle.label}]")


@dataclass
class DominanceReport:
    """Per-t comparison of an empirical tail with a tail bound."""

    t: np.ndarray
    empirical: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    violation: np.ndarray
    slack_sigmas: float
    notes: list[str] = field(default_factory=list)

    @property
    def n_violations(self) -> int:
        return int(np.count_nonzero(self.violation))

    @property
    def margin(self) -> np.ndarray:
        return self.bound - (self.empirical - self.slack_sigmas * self.stderr)

    def to_csv(self, path: str | Path) -> Path:
        return write_csv(
            path,
            ("t", "empirical", "stderr", "bound", "violation"),
            (self.t, self.empirical, self.stderr, self.bound, self.violation),
        )


def check_tail_dominance(
    s: EmpiricalSample,
    bound,
    slack_sigmas: float = 3.0,
    n_points: int = 64,
    t_grid=None,
    min_exceedances: int = 50,
    quantile: float = 0.999,
) -> DominanceReport:
    """Flag t where the empirical tail exceeds ``bound(t)`` beyond the slack.

    The default grid is log-spaced from ``bound.valid_from`` to the sample's
    ``quantile``; points with fewer than ``min_exceedances`` sample values
    above them are dropped because their tail estimate is too noisy.
    """
    lo = float(getattr(bound, "valid_from", 0.0))
    notes: list[str] = []
    if t_grid is None:
        hi = s.quantile(quantile)
        if min_exceedances > 0 and s.n > min_exceedances:
            # strictly above values[n-k-1] there are at least k values
            hi = min(hi, float(s.values[s.n - min_exceedances - 1]))
        if lo > 0 and hi > lo:
            t = log_grid(lo, hi, n_points)
        elif lo <= 0 < hi:
            t = np.linspace(0.0, hi, n_points)
        else:
            t = np.empty(0)
            notes.append(f"empty t-grid: sample {quantile} quantile {hi:.6g} <= valid_from {lo:.6g}")
    else:
        t = np.asarray(t_grid, dtype=float)
    frac, se = empirical_tail(s, t)
    frac, se = np.atleast_1d(frac), np.atleast_1d(se)
    if min_exceedances > 0 and t.size:
        keep = frac * s.n >= min_exceedances
        if not np.all(keep):
            notes.append(f"dropped {int(np.sum(~keep))} t points with < {min_exceedances} exceedances")
        t, frac, se = t[keep], frac[keep], se[keep]
    b = np.atleast_1d(np.asarray(bound(t), dtype=float)) if t.size else np.empty(0)
    violation = frac - slack_sigmas * se > b
    return DominanceReport(t, frac, se, b, violation, slack_sigmas, notes)
