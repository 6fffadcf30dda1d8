"""
Stoichiometric-window solve.

Given electrode capacities, a consistent pair of current SOLs and the cell
voltage limits, the four window endpoints satisfy::

    Qn*(thn - thn0)   = Qp*(thp0 - thp)       charge removable down to 0 % SOC
    Qn*(thn100 - thn) = Qp*(thp - thp100)     charge storable up to 100 % SOC
    Up(thp0)   - Un(thn0)   = vmin
    Up(thp100) - Un(thn100) = vmax
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from electrode_soh.errors import ConfigurationError
from electrode_soh.model.esoh import EsohParams
from electrode_soh.model.ocp import OcpCurve, ocp

from .newton import damped_newton

logger = logging.getLogger(__name__)

__all__ = [
    "WindowSolveInput",
    "WindowSolution",
    "SolverSchedule",
    "window_residuals",
    "solve_windows",
]

Windows = Tuple[float, float, float, float]

ENDPOINT_NUDGE = 1e-6
RESIDUAL_LIMIT = 1e-9


@dataclass(frozen=True, slots=True)
class WindowSolveInput:
    """Capacities (Ah), current SOL estimates, voltage limits and the warm start."""

    qp: float
    qn: float
    thp: float
    thn: float
    vmin: float
    vmax: float
    previous: Windows

    def __post_init__(self) -> None:
        if not self.vmax > self.vmin:
            raise ConfigurationError(f"vmax ({self.vmax}) must exceed vmin ({self.vmin})")
        if not (self.qp > 0 and self.qn > 0):
            raise ValueError(f"Capacities must be positive (qp={self.qp}, qn={self.qn})")
        values = (self.qp, self.qn, self.thp, self.thn, self.vmin, self.vmax, *self.previous)
        if not all(np.isfinite(values)):
            raise ValueError("Window-solve inputs must be finite")


@dataclass(frozen=True, slots=True)
class WindowSolution:
    """Endpoints ``(thp0, thp100, thn0, thn100)`` and how they were obtained."""

    windows: Windows
    method: str
    iterations: int
    residual_norm: float
    failed: bool = False

    def as_esoh(self, qp: float, qn: float, eta: float = 1.0) -> EsohParams:
        thp0, thp100, thn0, thn100 = self.windows
        return EsohParams(qp=qp, qn=qn, thp0=thp0, thp100=thp100, thn0=thn0, thn100=thn100, eta=eta)


def window_residuals(
    windows,
    inp: WindowSolveInput,
    positive: OcpCurve,
    negative: OcpCurve,
) -> np.ndarray:
    """Residuals of the four window equations (Ah, Ah, V, V)."""

    thp0, thp100, thn0, thn100 = windows
    return np.array(
        [
            inp.qn * (inp.thn - thn0) - inp.qp * (thp0 - inp.thp),
            inp.qn * (thn100 - inp.thn) - inp.qp * (inp.thp - thp100),
            ocp(positive, thp0) - ocp(negative, thn0) - inp.vmin,
            ocp(positive, thp100) - ocp(negative, thn100) - inp.vmax,
        ]
    )


def _nudged(inp: WindowSolveInput) -> WindowSolveInput:
    """Move SOLs sitting on a warm-start endpoint inward along the charge line."""

    _, _, thn0, thn100 = inp.previous
    shift = 0.0
    if inp.thn - thn0 < ENDPOINT_NUDGE:
        shift = ENDPOINT_NUDGE
    elif thn100 - inp.thn < ENDPOINT_NUDGE:
        shift = -ENDPOINT_NUDGE
    if not shift:
        return inp
    return WindowSolveInput(
        qp=inp.qp,
        qn=inp.qn,
        thp=inp.thp - shift * inp.qn / inp.qp,
        thn=inp.thn + shift,
        vmin=inp.vmin,
        vmax=inp.vmax,
        previous=inp.previous,
    )


def _admissible(windows, residual_norm: float) -> bool:
    thp0, thp100, thn0, thn100 = windows
    return (
        residual_norm < RESIDUAL_LIMIT
        and all(0.0 <= w <= 1.0 for w in windows)
        and thp0 > thp100
        and thn100 > thn0
    )


def _bracketed(inp: WindowSolveInput, positive: OcpCurve, negative: OcpCurve) -> Optional[Windows]:
    """
    Substitute the two charge equations and bracket each voltage equation.

    Each reduced equation is monotone in the negative endpoint, so a sign change
    over the admissible interval pins the root.
    """

    ratio = inp.qn / inp.qp

    def low(thn0: float) -> float:
        return ocp(positive, inp.thp + ratio * (inp.thn - thn0)) - ocp(negative, thn0) - inp.vmin

    def high(thn100: float) -> float:
        return ocp(positive, inp.thp - ratio * (thn100 - inp.thn)) - ocp(negative, thn100) - inp.vmax

    lo_a = max(0.0, inp.thn - (1.0 - inp.thp) / ratio)
    lo_b = inp.thn
    hi_a = inp.thn
    hi_b = min(1.0, inp.thn + inp.thp / ratio)

    try:
        if low(lo_a) * low(lo_b) > 0 or high(hi_a) * high(hi_b) > 0:
            return None
        thn0 = brentq(low, lo_a, lo_b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        thn100 = brentq(high, hi_a, hi_b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (ValueError, RuntimeError):
        return None

    thp0 = inp.thp + ratio * (inp.thn - thn0)
    thp100 = inp.thp - ratio * (thn100 - inp.thn)
    return (thp0, thp100, thn0, thn100)


def solve_windows(
    inp: WindowSolveInput,
    positive: OcpCurve,
    negative: OcpCurve,
    *,
    max_iter: int = 50,
    tol: float = 1e-10,
    fd_step: float = 1e-7,
) -> WindowSolution:
    """
    Solve the four window equations.

    Damped Newton from the warm start first, then bracketed root finding on the
    two voltage equations. When both fail the previous windows come back with
    ``failed=True``.

    :param inp: Capacities, SOLs, voltage limits and warm start.
    :param positive: Positive-electrode OCP.
    :param negative: Negative-electrode OCP.
    :returns: :class:`WindowSolution`.
    """

    work = _nudged(inp)

    def fun(x: np.ndarray) -> np.ndarray:
        return window_residuals(x, work, positive, negative)

    result = damped_newton(fun, np.asarray(inp.previous, dtype=float), tol=tol, max_iter=max_iter, fd_step=fd_step)
    windows = tuple(float(v) for v in result.x)
    norm = float(np.max(np.abs(fun(result.x))))
    if result.success and _admissible(windows, norm):
        return WindowSolution(windows, "newton", int(result.nit), norm)

    logger.warning("Newton window solve failed (%s, |F|=%.3e); trying bracketed solve", result.message, norm)
    bracketed = _bracketed(work, positive, negative)
    if bracketed is not None:
        norm = float(np.max(np.abs(fun(np.asarray(bracketed)))))
        if _admissible(bracketed, norm):
            return WindowSolution(tuple(float(v) for v in bracketed), "bracket", int(result.nit), norm)

    logger.warning("Window solve failed; keeping previous windows %s", inp.previous)
    previous = tuple(float(v) for v in inp.previous)
    return WindowSolution(previous, "previous", int(result.nit), float(np.max(np.abs(fun(np.asarray(previous))))), failed=True)


class SolverSchedule:
    """
    Fires at the first sample and then every ``period_s`` seconds of data time.

    :param period_s: Solve period in seconds.
    """

    def __init__(self, period_s: float = 10000.0) -> None:
        if not period_s > 0:
            raise ValueError(f"period_s must be positive, got {period_s}")
        self.period_s = float(period_s)
        self._next: Optional[float] = None
        self.fired = 0

    def __call__(self, t_s: float) -> bool:
        if self._next is None or t_s >= self._next:
            base = t_s if self._next is None else self._next
            self._next = base + self.period_s
            while self._next <= t_s:
                self._next += self.period_s
            self.fired += 1
            return True
        return False
