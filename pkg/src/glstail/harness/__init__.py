"""Martingale simulation, Doob/BDG verification and the command-line interface."""

from .config import ExperimentConfig, load_config
from .simulate import IncrementLaw, MartingalePathBatch, simulate_martingale
from .verify import VerificationReport, fit_power_exponent, verify_bdg, verify_doob

__all__ = [
    "ExperimentConfig",
    "IncrementLaw",
    "MartingalePathBatch",
    "VerificationReport",
    "fit_power_exponent",
    "load_config",
    "simulate_martingale",
    "verify_bdg",
    "verify_doob",
]
