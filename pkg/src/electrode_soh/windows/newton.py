"""Damped Newton iteration for small square systems."""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np
from scipy.optimize import OptimizeResult

logger = logging.getLogger(__name__)

__all__ = ["central_jacobian", "damped_newton"]

Residual = Callable[[np.ndarray], np.ndarray]


def central_jacobian(fun: Residual, x: np.ndarray, step: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian of ``fun`` at ``x``."""

    x = np.asarray(x, dtype=float)
    f0 = np.asarray(fun(x), dtype=float)
    jac = np.empty((f0.size, x.size))
    for j in range(x.size):
        dx = np.zeros_like(x)
        dx[j] = step
        jac[:, j] = (np.asarray(fun(x + dx)) - np.asarray(fun(x - dx))) / (2.0 * step)
    return jac


def damped_newton(
    fun: Residual,
    x0: np.ndarray,
    *,
    jac: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tol: float = 1e-10,
    max_iter: int = 50,
    fd_step: float = 1e-7,
    min_damping: float = 2.0**-20,
) -> OptimizeResult:
    """
    Solve ``fun(x) = 0`` by Newton steps with backtracking on ``|fun|``.

    A singular Jacobian falls back to the least-squares step.

    :param fun: Residual function returning an array shaped like ``x0``.
    :param x0: Starting point (not modified).
    :param jac: Optional analytic Jacobian; central differences otherwise.
    :param tol: Convergence threshold on the residual infinity norm.
    :param max_iter: Newton iterations before giving up.
    :param fd_step: Difference step for the numerical Jacobian.
    :param min_damping: Smallest step fraction tried by the line search.
    :returns: ``OptimizeResult`` with ``x``, ``fun``, ``success``, ``nit`` and ``message``.
    """

    x = np.array(x0, dtype=float)
    fx = np.asarray(fun(x), dtype=float)
    norm = float(np.max(np.abs(fx)))
    jacobian = jac or (lambda v: central_jacobian(fun, v, fd_step))

    for it in range(max_iter):
        if not np.isfinite(norm):
            return OptimizeResult(x=x, fun=fx, success=False, nit=it, message="non-finite residual")
        if norm < tol:
            return OptimizeResult(x=x, fun=fx, success=True, nit=it, message="converged")

        J = jacobian(x)
        try:
            step = np.linalg.solve(J, fx)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, fx, rcond=None)[0]

        damping = 1.0
        while True:
            trial = x - damping * step
            f_trial = np.asarray(fun(trial), dtype=float)
            trial_norm = float(np.max(np.abs(f_trial)))
            if np.isfinite(trial_norm) and trial_norm < norm:
                break
            damping *= 0.5
            if damping < min_damping:
                return OptimizeResult(x=x, fun=fx, success=False, nit=it, message="line search stalled")

        x, fx, norm = trial, f_trial, trial_norm
        logger.debug("Newton iter %d |F|=%.3e damping=%.3g", it + 1, norm, damping)

    success = norm < tol
    return OptimizeResult(
        x=x,
        fun=fx,
        success=success,
        nit=max_iter,
        message="converged" if success else "maximum iterations reached",
    )
