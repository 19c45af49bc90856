"""Experiment configuration, loadable from an INI-style key-value file.

Schema (section ``[experiment]``, every key optional)::

    kernel          = doob | bdg              # which verification to run
    law             = gaussian:1 | rademacher | uniform:a
    n_steps         = 64
    n_trials        = 100000
    seed            = 7
    p_grid          = 2, 3, 4, 6, 8           # moment-check orders
    fit_window      = 2, 16                   # p-range for the power fit and GLS norm
                                              # (default 2, 16 for doob and 2, 6 for bdg)
    t_points        = 64                      # size of the tail-check grid
    slack_sigmas    = 3
    min_exceedances = 50
    workers         = 1
    out_dir         = out
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..errors import SpecParseError
from .simulate import IncrementLaw

__all__ = ["ExperimentConfig", "load_config", "MIN_VERIFY_TRIALS"]

MIN_VERIFY_TRIALS = 1000

# BDG with constant sqrt(e) is only trusted for small p; see verify_bdg.
DEFAULT_FIT_WINDOW = {"doob": (2.0, 16.0), "bdg": (2.0, 6.0)}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: str = "doob"
    law: IncrementLaw = field(default_factory=lambda: IncrementLaw("gaussian", 1.0))
    n_steps: int = 64
    n_trials: int = 100_000
    seed: int = 7
    p_grid: tuple[float, ...] = (2.0, 3.0, 4.0, 6.0, 8.0)
    fit_window: tuple[float, float] | None = None
    t_points: int = 64
    slack_sigmas: float = 3.0
    min_exceedances: int = 50
    workers: int = 1
    out_dir: Path = Path("out")

    def __post_init__(self) -> None:
        if isinstance(self.law, str):
            object.__setattr__(self, "law", IncrementLaw.parse(self.law))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        if self.fit_window is None:
            object.__setattr__(self, "fit_window", DEFAULT_FIT_WINDOW.get(self.kernel, (2.0, 16.0)))
        object.__setattr__(self, "fit_window", tuple(float(p) for p in self.fit_window))
        if self.kernel not in ("doob", "bdg"):
            raise SpecParseError(f"kernel must be doob or bdg, got {self.kernel!r}")
        if len(self.fit_window) != 2 or not 1 <= self.fit_window[0] < self.fit_window[1]:
            raise SpecParseError(f"fit_window must be 'lo, hi' with 1 <= lo < hi, got {self.fit_window}")
        if not self.p_grid:
            raise SpecParseError("p_grid is empty")
        floor = 2.0 if self.kernel == "bdg" else 1.0
        if min(self.p_grid) < floor or (self.kernel == "doob" and min(self.p_grid) == 1.0):
            raise SpecParseError(f"p_grid for {self.kernel} must lie in {'[2, inf)' if floor == 2 else '(1, inf)'}")
        if self.n_steps < 1 or self.n_trials < 1 or self.workers < 1 or self.t_points < 2:
            raise SpecParseError("n_steps, n_trials, workers must be >= 1 and t_points >= 2")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_CONVERTERS = {
    "kernel": str.strip,
    "law": IncrementLaw.parse,
    "n_steps": int,
    "n_trials": int,
    "seed": int,
    "p_grid": _floats,
    "fit_window": _floats,
    "t_points": int,
    "slack_sigmas": float,
    "min_exceedances": int,
    "workers": int,
    "out_dir": Path,
}


def load_config(path: str | Path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if not parser.read(path):
        raise SpecParseError(f"cannot read config file {path}")
    if "experiment" not in parser:
        raise SpecParseError(f"{path}: missing [experiment] section")
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for key, raw in parser["experiment"].items():
        if key not in known:
            raise SpecParseError(f"{path}: unknown key {key!r}")
        try:
            values[key] = _CONVERTERS[key](raw)
        except ValueError as exc:
            raise SpecParseError(f"{path}: bad value for {key}: {exc}") from None
    return ExperimentConfig(**values)
