"""Fit costs between a model trace and a measured trace."""

from __future__ import annotations

import numpy as np

__all__ = ["cost_j1", "cost_j2", "scalarized_cost"]


def _pair(model_v, test_v):
    model_v = np.asarray(model_v, dtype=float)
    test_v = np.asarray(test_v, dtype=float)
    if model_v.shape != test_v.shape:
        raise ValueError(f"Trace shapes differ: {model_v.shape} vs {test_v.shape}")
    if model_v.size == 0:
        raise ValueError("Traces are empty")
    return model_v, test_v


def cost_j1(model_v, test_v) -> float:
    """RMS voltage error (V)."""

    model_v, test_v = _pair(model_v, test_v)
    return float(np.sqrt(np.mean((model_v - test_v) ** 2)))


def cost_j2(model_v, test_v, dt) -> float:
    """
    RMS error of the sample-to-sample voltage slopes (V/s).

    :param dt: Scalar period, or per-sample intervals of length ``n`` (entry 0
        ignored) or ``n - 1``.
    :raises ValueError: With fewer than two samples.
    """

    model_v, test_v = _pair(model_v, test_v)
    n = model_v.size
    if n < 2:
        raise ValueError("J2 needs at least two samples")
    dt = np.asarray(dt, dtype=float)
    if dt.ndim == 0:
        steps = np.full(n - 1, float(dt))
    elif dt.size == n:
        steps = dt[1:]
    elif dt.size == n - 1:
        steps = dt
    else:
        raise ValueError(f"dt has {dt.size} entries for {n} samples")
    if np.any(steps <= 0):
        raise ValueError("Sample intervals must be positive")
    slope_err = (np.diff(model_v) - np.diff(test_v)) / steps
    return float(np.sqrt(np.mean(slope_err**2)))


def scalarized_cost(model_v, test_v, dt, w1: float = 1.0, w2: float = 100.0) -> float:
    """``w1*J1 + w2*J2``; ``w2`` is in seconds so both terms are in volts."""

    return w1 * cost_j1(model_v, test_v) + w2 * cost_j2(model_v, test_v, dt)
