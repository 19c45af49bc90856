"""Monte Carlo verification of the Doob and BDG moment and tail transfers.

Each verification has two levels:

* moment level: compare empirical moments of the running maximum with the
  right-hand side of the maximal inequality at each order in ``p_grid``;
* tail level: fit a power profile ``p**(1/m)`` to the empirical moments of
  the driving variable inside ``fit_window``, normalise by its GLS norm,
  push the profile through the transfer kernel and compare the resulting
  tail bound with the empirical tail of the running maximum.

The tail transfer only uses moment orders inside ``fit_window``; outside it
the empirical moments were never checked against the fitted profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .._io import write_csv
from ..conjugate import ConjugateTable, TailBound
from ..moments import (
    DominanceReport,
    EmpiricalSample,
    check_tail_dominance,
    empirical_moment,
    function_oracle,
    gls_norm,
    sample_oracle,
)
from ..psi_functions import GeneratingFunction, PDomain, log_grid, make_constant, make_power
from ..transfer import bdg_kernel, build_psi_function, doob_kernel
from .config import ExperimentConfig
from .simulate import MartingalePathBatch, simulate_martingale

__all__ = ["PowerFit", "VerificationReport", "fit_power_exponent", "verify_doob", "verify_bdg"]

ROOT_E = math.sqrt(math.e)
FIT_POINTS = 16
TAU_POINTS = 256
Y_POINTS = 256


class PowerFit(NamedTuple):
    inv_m: float
    intercept: float

    @property
    def m(self) -> float:
        return math.inf if self.inv_m <= 0 else 1.0 / self.inv_m


def fit_power_exponent(s: EmpiricalSample, window: tuple[float, float], n: int = FIT_POINTS) -> PowerFit:
    """Least-squares slope of ln|zeta|_p against ln p over a log grid in ``window``."""
    p = log_grid(window[0], window[1], n)
    mom = np.array([empirical_moment(s, float(q)).value for q in p])
    if not np.all(mom > 0):
        raise ValueError("cannot fit a power profile to a sample without positive moments")
    slope, intercept = np.polyfit(np.log(p), np.log(mom), 1)
    return PowerFit(float(slope), float(intercept))


def _profile(fit: PowerFit, hi: float) -> GeneratingFunction:
    domain = PDomain.closed(1.0, hi)
    if fit.inv_m <= 0:
        return make_constant(1.0, domain)
    return make_power(fit.m, domain)


@dataclass
class VerificationReport:
    name: str
    p: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    stderr: np.ndarray
    slack_sigmas: float
    tail: DominanceReport | None = None
    table: ConjugateTable | None = None
    fit: PowerFit | None = None
    scale_C: float | None = None
    notes: list[str] = field(default_factory=list)
    hard: bool = True

    @property
    def margin(self) -> np.ndarray:
        """rhs + slack * stderr - lhs; negative means a violation."""
        return self.rhs + self.slack_sigmas * self.stderr - self.lhs

    @property
    def moment_violations(self) -> int:
        return int(np.count_nonzero(self.margin < 0))

    @property
    def tail_violations(self) -> int:
        return 0 if self.tail is None else self.tail.n_violations

    @property
    def violations(self) -> int:
        return self.moment_violations + self.tail_violations

    @property
    def failed(self) -> bool:
        return self.hard and self.violations > 0

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        paths = {"moment": write_csv(out / "moment_report.csv", ("p", "lhs", "rhs", "margin"),
                                     (self.p, self.lhs, self.rhs, self.margin))}
        tail = self.tail or DominanceReport(*(np.empty(0),) * 5, self.slack_sigmas)
        paths["tail"] = tail.to_csv(out / "tail_report.csv")
        if self.table is not None:
            paths["conjugate"] = self.table.to_csv(out / "conjugate.csv")
        return paths

    def summary(self) -> str:
        lines = [f"{self.name}: moment violations {self.moment_violations}/{self.p.size}, "
                 f"tail violations {self.tail_violations}/{0 if self.tail is None else self.tail.t.size}"]
        for p, l, r, m in zip(self.p, self.lhs, self.rhs, self.margin):
            flag = "" if m >= 0 else ("  VIOLATION" if self.hard else "  WARNING")
            lines.append(f"  p={p:g}: lhs={l:.6g} rhs={r:.6g} margin={m:.4g}{flag}")
        if self.fit is not None:
            lines.append(f"  fitted m={self.fit.m:.4g} (1/m={self.fit.inv_m:.4g}), GLS scale C={self.scale_C:.6g}")
        if self.tail is not None and self.tail.t.size:
            lines.append(f"  tail grid t in [{self.tail.t[0]:.6g}, {self.tail.t[-1]:.6g}], "
                         f"min bound margin {np.min(self.tail.margin):.4g}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _batch(cfg: ExperimentConfig, batch: MartingalePathBatch | None) -> MartingalePathBatch:
    if batch is not None:
        return batch
    return simulate_martingale(cfg.n_steps, cfg.n_trials, cfg.law, cfg.seed, cfg.workers)


def _tail_check(
    report: VerificationReport,
    cfg: ExperimentConfig,
    target: EmpiricalSample,
    driver: EmpiricalSample,
    make_tau,
) -> None:
    """Fit, normalise, transfer and compare; ``make_tau(profile)`` builds tau."""
    if driver.values[-1] == 0 or target.values[-1] == 0:
        report.notes.append("degenerate sample (identically zero); tail bound trivially satisfied")
        return
    lo, hi = cfg.fit_window
    fit = fit_power_exponent(driver, cfg.fit_window)
    beta = _profile(fit, hi)
    window = PDomain.closed(lo, hi)
    scale = gls_norm(sample_oracle(driver), GeneratingFunction(window, beta.func, beta.tag), grid=FIT_POINTS).value
    tau = make_tau(beta)
    t_hi = max(target.quantile(0.9999), scale * math.e * 1.5)
    bound = TailBound.from_psi(tau, scale, t_max=t_hi, n_y=Y_POINTS, p_max=hi)
    report.fit, report.scale_C, report.table = fit, scale, bound.table
    report.tail = check_tail_dominance(
        target, bound, cfg.slack_sigmas, cfg.t_points, min_exceedances=cfg.min_exceedances
    )
    report.notes.extend(report.tail.notes)


def verify_doob(cfg: ExperimentConfig, batch: MartingalePathBatch | None = None) -> VerificationReport:
    """|M*|_p <= p/(p-1) |eps_n|_p at each p, then the transferred tail bound for M*."""
    b = _batch(cfg, batch)
    p = np.array(cfg.p_grid)
    lhs, rhs, se = [], [], []
    for q in p:
        l, sl = empirical_moment(b.running_max, q)
        r, sr = empirical_moment(b.terminal, q)
        f = q / (q - 1.0)
        lhs.append(l)
        rhs.append(f * r)
        se.append(math.hypot(sl, f * sr))
    report = VerificationReport("doob", p, np.array(lhs), np.array(rhs), np.nan_to_num(np.array(se)), cfg.slack_sigmas)

    lo, hi = cfg.fit_window
    kernel = doob_kernel(p0=lo)

    def make_tau(beta):
        return build_psi_function(kernel, function_oracle(beta), log_grid(1.0, hi, TAU_POINTS))

    _tail_check(report, cfg, b.running_max, b.terminal, make_tau)
    return report


def verify_bdg(cfg: ExperimentConfig, batch: MartingalePathBatch | None = None) -> VerificationReport:
    """|M*|_p <= sqrt(e) |<M,M>|_{p/2}^{1/2} at each p >= 2, then the tail transfer.

    Violations are warnings: the constant sqrt(e) is quoted for continuous
    martingales and is not guaranteed for every discrete martingale and p.
    """
    b = _batch(cfg, batch)
    qv = EmpiricalSample(b.quad_variation_sqrt.values ** 2, b.quad_variation_sqrt.seed_info)
    p = np.array(cfg.p_grid)
    lhs, rhs, se = [], [], []
    for q in p:
        l, sl = empirical_moment(b.running_max, q)
        r, sr = empirical_moment(qv, q / 2.0)
        root = math.sqrt(r)
        lhs.append(l)
        rhs.append(ROOT_E * root)
        # delta method for sqrt
        se.append(math.hypot(sl, ROOT_E * sr / (2.0 * root) if root > 0 else 0.0))
    report = VerificationReport("bdg", p, np.array(lhs), np.array(rhs), np.nan_to_num(np.array(se)),
                                cfg.slack_sigmas, hard=False)
    for q, m in zip(p, report.margin):
        if m < 0:
            report.notes.append(f"BDG moment check exceeded at p={q:g} by {-m:.4g} (warning only)")

    lo, hi = cfg.fit_window
    kernel = bdg_kernel(p0=max(lo, 2.0))

    def make_tau(beta_sqrt):
        # profile of <M,M> at r is beta_sqrt(2r)^2, so ||<M,M>|| = C^2 and C^2^(1/2) = C
        f = beta_sqrt.func
        beta_qv = GeneratingFunction(PDomain.closed(1.0, hi / 2.0), lambda r: f(2.0 * r) ** 2, f"qv[{beta_sqrt.tag}]")
        return build_psi_function(kernel, function_oracle(beta_qv), log_grid(1.0, hi, TAU_POINTS))

    _tail_check(report, cfg, b.running_max, b.quad_variation_sqrt, make_tau)
    if report.tail_violations:
        report.notes.append(f"{report.tail_violations} BDG tail-bound exceedances (warning only)")
    return report
