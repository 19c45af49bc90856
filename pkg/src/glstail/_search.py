"""Vectorised golden-section search used to refine grid optima."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray, iters: int):
    """Vectorised golden-section search for a maximum on each bracket [a_i, b_i].

    Returns the best abscissa seen and its value; NaN values count as -inf.
    """
    a = a.copy()
    b = b.copy()

    def g(x):
        v = f(x)
        return np.where(np.isnan(v), -np.inf, v)

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = g(c), g(d)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - INV_PHI * (b - a), d)
        d_new = np.where(left, c, a + INV_PHI * (b - a))
        x_new = np.where(left, c_new, d_new)
        f_new = g(x_new)
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = c_new, d_new
    take_c = fc >= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd)
