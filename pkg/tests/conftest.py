import math

import numpy as np
import pytest
from scipy import integrate


def dense_hstar(psi_func, y, p_lo, p_hi, n=400_001):
    """Brute-force sup_p (p y - p ln psi(p)) on a dense uniform-in-ln(p) grid.

    Shares nothing with fenchel_transform beyond the definition.
    """
    p = np.exp(np.linspace(math.log(p_lo), math.log(p_hi), n))
    h = p * np.log(psi_func(p))
    return np.array([np.max(p * yi - h) for yi in np.atleast_1d(y)])


def gaussian_abs_moment_quad(p):
    """|N(0,1)|_p by direct integration against the normal density."""
    val, _ = integrate.quad(lambda x: 2 * x**p * math.exp(-x * x / 2) / math.sqrt(2 * math.pi), 0, np.inf)
    return val ** (1 / p)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
