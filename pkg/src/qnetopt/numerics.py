"""Small numerical building blocks shared by the integrators and estimators."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np

from qnetopt.errors import SolverError

Rhs = Callable[[np.ndarray], np.ndarray]


def rk4_step(fn: Rhs, y: np.ndarray, h: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step of an autonomous system."""
    k1 = fn(y)
    k2 = fn(y + 0.5 * h * k1)
    k3 = fn(y + 0.5 * h * k2)
    k4 = fn(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def uniform_substeps(length: float, dt: float, *, even: bool = False) -> int:
    """Number of equal substeps of size <= dt covering an interval of ``length``."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    steps = max(1, math.ceil(length / dt - 1e-9))
    if even:
        steps = max(2, steps + (steps % 2))
    return steps


def rk4_segment(
    fn: Rhs, y0: np.ndarray, t0: float, t1: float, dt: float, *, even: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate over [t0, t1] on a uniform grid; returns (times, states) including t0."""
    steps = uniform_substeps(t1 - t0, dt, even=even)
    h = (t1 - t0) / steps
    times = t0 + h * np.arange(steps + 1)
    times[-1] = t1
    states = np.empty((steps + 1, y0.shape[0]))
    states[0] = y0
    y = y0
    for i in range(steps):
        y = rk4_step(fn, y, h)
        if not np.all(np.isfinite(y)):
            raise SolverError(f"Non-finite values at t={times[i + 1]:.6g}; reduce dt")
        states[i + 1] = y
    return times, states


def mean_and_std_error(samples: Sequence[float]) -> tuple[float, float]:
    """Order-independent sample mean and standard error (compensated sums)."""
    n = len(samples)
    if n < 2:
        raise ValueError("at least two samples are required")
    mean = math.fsum(samples) / n
    var = math.fsum((s - mean) ** 2 for s in samples) / (n - 1)
    return mean, math.sqrt(var / n)
