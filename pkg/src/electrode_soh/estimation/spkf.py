"""
Sigma-point filter kernels for one electrode.

Each electrode carries the state ``(vC1, vC2, theta)``. The state equation is
linear, so the time update is the plain ``A x + B u``; only the output map
(the cell voltage, which couples both electrodes) goes through sigma points.
Weights follow the central-difference convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from electrode_soh.errors import ConfigurationError, CovarianceDegenerateError, NumericalDegeneracyError
from electrode_soh.model.eecm import half_cell_potential, rc_discretize, sol_direction
from electrode_soh.model.ocp import OcpCurve
from electrode_soh.model.tables import HalfCellParamTable, interpolate_rc

logger = logging.getLogger(__name__)

__all__ = [
    "STATE_DIM",
    "FilterState",
    "NoiseConfig",
    "weights",
    "discrete_matrices",
    "predict_state",
    "predict_covariance",
    "symmetrize",
    "jittered_cholesky",
    "sigma_points",
    "output_prediction",
    "gain_and_update",
]

STATE_DIM = 3


def weights(h: float, n: int = STATE_DIM) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mean and covariance weights for ``2n + 1`` points.

    ``alpha_0 = (h^2 - n)/h^2`` and ``alpha_i = 1/(2 h^2)``; both sets coincide.
    """

    if not h > 0:
        raise ConfigurationError(f"Sigma-point spread must be positive, got {h}")
    wm = np.full(2 * n + 1, 1.0 / (2.0 * h * h))
    wm[0] = (h * h - n) / (h * h)
    return wm, wm.copy()


@dataclass(frozen=True, eq=False)
class FilterState:
    """Estimate ``(vC1, vC2, theta)`` and its covariance for one electrode."""

    electrode: str
    xhat: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "xhat", np.asarray(self.xhat, dtype=float).reshape(STATE_DIM))
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=float).reshape(STATE_DIM, STATE_DIM))

    @property
    def theta(self) -> float:
        return float(self.xhat[2])

    @property
    def theta_var(self) -> float:
        return float(self.cov[2, 2])

    def with_mean(self, xhat: np.ndarray) -> "FilterState":
        return replace(self, xhat=np.array(xhat, dtype=float))

    def with_cov(self, cov: np.ndarray) -> "FilterState":
        return replace(self, cov=np.array(cov, dtype=float))


@dataclass(frozen=True, eq=False)
class NoiseConfig:
    """Process covariance, measurement variance and sigma-point spread."""

    process: np.ndarray = field(default_factory=lambda: np.diag([1e-8, 1e-8, 1e-10]))
    measurement: float = 4e-6
    h: float = float(np.sqrt(3.0))

    def __post_init__(self) -> None:
        process = np.asarray(self.process, dtype=float)
        if process.ndim == 1:
            process = np.diag(process)
        object.__setattr__(self, "process", process)
        if process.shape != (STATE_DIM, STATE_DIM):
            raise ConfigurationError("Process covariance must be 3x3")
        if np.min(np.linalg.eigvalsh(symmetrize(process))) < -1e-15:
            raise ConfigurationError("Process covariance must be positive semidefinite")
        if not self.measurement > 0:
            raise ConfigurationError("Measurement variance must be positive")
        weights(self.h)

    @property
    def wm(self) -> np.ndarray:
        return weights(self.h)[0]

    @property
    def wc(self) -> np.ndarray:
        return weights(self.h)[1]


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def discrete_matrices(
    electrode: str,
    table: HalfCellParamTable,
    q_ah: float,
    eta: float,
    theta: float,
    dt: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ``A = diag(a1, a2, 1)`` and ``B = [R1(1-a1), R2(1-a2), +-eta*dt/(3600 Q)]``.

    Elements are interpolated at ``theta``; the SOL row carries the electrode's sign.
    """

    rc = interpolate_rc(table, theta)
    a1, b1 = rc_discretize(rc.r1, rc.c1, dt)
    a2, b2 = rc_discretize(rc.r2, rc.c2, dt)
    A = np.diag([a1, a2, 1.0])
    B = np.array([b1, b2, sol_direction(electrode) * eta * dt / (3600.0 * q_ah)])
    return A, B


def predict_state(
    fs: FilterState,
    table: HalfCellParamTable,
    q_ah: float,
    eta: float,
    current: float,
    dt: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Time update of the mean, ``x- = A x+ + B u``.

    :returns: ``(x_minus, A)`` so the covariance update can reuse ``A``.
    """

    A, B = discrete_matrices(fs.electrode, table, q_ah, eta, fs.theta, dt)
    return A @ fs.xhat + B * current, A


def predict_covariance(cov: np.ndarray, A: np.ndarray, process: np.ndarray) -> np.ndarray:
    """``A cov A^T + process``, symmetrised."""

    return symmetrize(A @ cov @ A.T + process)


def jittered_cholesky(cov: np.ndarray, tries: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lower Cholesky factor, adding ``1e-12 * trace/3 * I`` up to ``tries`` times.

    :returns: ``(S, matrix)`` where ``matrix`` is the symmetrised, possibly jittered input.
    :raises CovarianceDegenerateError: When the matrix stays indefinite.
    """

    work = symmetrize(np.asarray(cov, dtype=float))
    bump = 1e-12 * max(np.trace(work), 0.0) / STATE_DIM * np.eye(work.shape[0])
    for attempt in range(tries + 1):
        try:
            return linalg.cholesky(work, lower=True), work
        except linalg.LinAlgError:
            if attempt == tries:
                break
            work = work + bump
            logger.debug("Cholesky failed; jitter %d/%d", attempt + 1, tries)
    raise CovarianceDegenerateError("Covariance is not positive definite after jitter")


def sigma_points(mean: np.ndarray, cov: np.ndarray, h: float, tries: int = 3) -> np.ndarray:
    """
    ``{m, m + h*S[:, j], m - h*S[:, j]}`` with ``S`` the lower Cholesky factor.

    :returns: Array shaped ``(2n + 1, n)``.
    """

    mean = np.asarray(mean, dtype=float)
    S, _ = jittered_cholesky(cov, tries)
    spread = h * S.T
    return np.vstack([mean, mean + spread, mean - spread])


def output_prediction(
    electrode: str,
    points: np.ndarray,
    other_mean: np.ndarray,
    curves: Sequence[OcpCurve],
    tables: Sequence[HalfCellParamTable],
    current: float,
    wm: np.ndarray,
) -> Tuple[np.ndarray, float]:
    """
    Cell-voltage predictions for ``electrode``'s sigma points.

    The other electrode enters through its predicted mean only.

    :param curves: ``(negative, positive)`` OCPs.
    :param tables: ``(negative, positive)`` element tables.
    :returns: ``(Y, yhat)``.
    """

    neg_curve, pos_curve = curves
    neg_table, pos_table = tables
    if electrode == "positive":
        own = half_cell_potential("positive", pos_curve, pos_table, points[:, 2], points[:, 0], points[:, 1], current)
        other = half_cell_potential(
            "negative", neg_curve, neg_table, other_mean[2], other_mean[0], other_mean[1], current
        )
        Y = own - other
    else:
        own = half_cell_potential("negative", neg_curve, neg_table, points[:, 2], points[:, 0], points[:, 1], current)
        other = half_cell_potential(
            "positive", pos_curve, pos_table, other_mean[2], other_mean[0], other_mean[1], current
        )
        Y = other - own
    Y = np.asarray(Y, dtype=float)
    return Y, float(wm @ Y)


def gain_and_update(
    electrode: str,
    x_minus: np.ndarray,
    cov_minus: np.ndarray,
    points: np.ndarray,
    Y: np.ndarray,
    yhat: float,
    measured: float,
    wc: np.ndarray,
    measurement_var: float,
    tries: int = 3,
) -> FilterState:
    """
    Measurement update.

    :raises NumericalDegeneracyError: When the innovation variance is not positive.
    :raises CovarianceDegenerateError: When the posterior stays indefinite after jitter.
    """

    dy = Y - yhat
    s_y = float(wc @ (dy * dy)) + measurement_var
    if not s_y > 0 or not np.isfinite(s_y):
        raise NumericalDegeneracyError(f"Innovation variance {s_y} is not positive")
    s_xy = (wc * dy) @ (points - x_minus)
    gain = s_xy / s_y
    x_plus = x_minus + gain * (measured - yhat)
    cov_plus = symmetrize(cov_minus - s_y * np.outer(gain, gain))

    _, cov_plus = jittered_cholesky(cov_plus, tries)
    return FilterState(electrode, x_plus, cov_plus)
