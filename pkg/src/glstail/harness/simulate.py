"""Discrete-time martingales built from independent centered increments.

Reproducibility scheme: trial ``i`` of a run with master seed ``s`` draws all
of its increments from ``numpy.random.Philox`` keyed by ``s * 2**64 + i``.
Each trial's stream depends only on ``(s, i)``, so results are identical for
any chunking or number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import SpecParseError
from ..moments import EmpiricalSample

__all__ = ["IncrementLaw", "MartingalePathBatch", "simulate_martingale", "trial_generator"]

CHUNK = 2048
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class IncrementLaw:
    """Law of the i.i.d. increments d_k: gaussian(sigma), rademacher or uniform(-a, a)."""

    kind: str
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("gaussian", "rademacher", "uniform"):
            raise ValueError(f"unknown increment law {self.kind!r}")
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise ValueError(f"{self.kind} scale must be finite and >= 0, got {self.scale}")

    @classmethod
    def parse(cls, text: str) -> "IncrementLaw":
        """``gaussian``, ``gaussian:0.5``, ``rademacher``, ``uniform:2`` ..."""
        name, _, arg = text.strip().partition(":")
        name = name.strip().lower()
        try:
            scale = float(arg) if arg else 1.0
            return cls(name, scale)
        except ValueError as exc:
            raise SpecParseError(f"bad increment law {text!r}: {exc}") from None

    def __str__(self) -> str:
        return self.kind if self.kind == "rademacher" and self.scale == 1.0 else f"{self.kind}:{self.scale:g}"

    def draw(self, gen: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "gaussian":
            return self.scale * gen.standard_normal(n)
        if self.kind == "rademacher":
            return self.scale * (2.0 * gen.integers(0, 2, n) - 1.0)
        return gen.uniform(-self.scale, self.scale, n)

    @property
    def variance(self) -> float:
        if self.kind == "uniform":
            return self.scale**2 / 3.0
        return self.scale**2


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=((seed & _SEED_MASK) << 64) | trial))


@dataclass(frozen=True)
class MartingalePathBatch:
    """Per-trial summaries of simulated paths.

    ``running_max`` holds max(0, eps_1, ..., eps_n), i.e. the signed running
    maximum with eps_0 = 0 included; ``terminal`` holds |eps_n|;
    ``quad_variation_sqrt`` holds sqrt(sum_k d_k^2). The signed per-trial
    arrays are kept in trial order for pathwise checks.
    """

    n_steps: int
    n_trials: int
    law: IncrementLaw
    seed: int
    terminal: EmpiricalSample
    running_max: EmpiricalSample
    quad_variation_sqrt: EmpiricalSample
    terminal_signed: np.ndarray
    max_signed: np.ndarray


def _simulate_chunk(law: IncrementLaw, n_steps: int, seed: int, start: int, stop: int):
    d = np.empty((stop - start, n_steps))
    for row, i in enumerate(range(start, stop)):
        d[row] = law.draw(trial_generator(seed, i), n_steps)
    path = np.cumsum(d, axis=1)
    return path[:, -1], path.max(axis=1), np.sqrt(np.sum(d * d, axis=1))


def simulate_martingale(
    n_steps: int,
    n_trials: int,
    law: IncrementLaw | str,
    seed: int,
    workers: int = 1,
) -> MartingalePathBatch:
    """Simulate ``n_trials`` partial-sum martingales of ``n_steps`` steps."""
    if isinstance(law, str):
        law = IncrementLaw.parse(law)
    if n_steps < 1 or n_trials < 1:
        raise ValueError("n_steps and n_trials must be >= 1")
    if not 0 <= seed <= _SEED_MASK:
        raise ValueError("seed must be a 64-bit unsigned integer")
    bounds = [(a, min(a + CHUNK, n_trials)) for a in range(0, n_trials, CHUNK)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _simulate_chunk(law, n_steps, seed, *ab), bounds))
    else:
        parts = [_simulate_chunk(law, n_steps, seed, a, b) for a, b in bounds]
    terminal = np.concatenate([p[0] for p in parts])
    max_signed = np.concatenate([p[1] for p in parts])
    qv_sqrt = np.concatenate([p[2] for p in parts])
    info = f"philox key=(seed<<64)|trial, seed={seed}, law={law}, n_steps={n_steps}"
    return MartingalePathBatch(
        n_steps,
        n_trials,
        law,
        seed,
        EmpiricalSample.from_outcomes(terminal, info),
        EmpiricalSample(np.maximum(max_signed, 0.0), info),
        EmpiricalSample(qv_sqrt, info),
        terminal,
        max_signed,
    )
