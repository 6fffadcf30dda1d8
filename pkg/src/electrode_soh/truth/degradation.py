"""Aged eSOH parameters from loss-of-active-material and lithium-loss percentages."""

from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Any, Mapping

import numpy as np

from electrode_soh.errors import ConfigurationError, InfeasibleDegradationError
from electrode_soh.health.report import lithium_inventory
from electrode_soh.model.esoh import FARADAY, EsohParams
from electrode_soh.model.ocp import OcpCurve, ocp
from electrode_soh.windows.newton import damped_newton

logger = logging.getLogger(__name__)

__all__ = ["DegradationSpec", "apply_degradation", "degradation_residuals"]


@dataclass(frozen=True, slots=True)
class DegradationSpec:
    """LAM of each electrode and LLI, all in percent."""

    lam_p: float = 0.0
    lam_n: float = 0.0
    lli: float = 0.0

    def __post_init__(self) -> None:
        for name in ("lam_p", "lam_n", "lli"):
            value = getattr(self, name)
            if not 0.0 <= value < 80.0:
                raise ConfigurationError(f"{name}={value} outside [0, 80)")

    @property
    def is_fresh(self) -> bool:
        return self.lam_p == 0.0 and self.lam_n == 0.0 and self.lli == 0.0

    @classmethod
    def from_dict(cls, data: Mapping[str, Any] | None) -> "DegradationSpec":
        data = data or {}
        unknown = set(data) - {"lam_p", "lam_n", "lli"}
        if unknown:
            raise ConfigurationError(f"Unknown degradation keys {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


def degradation_residuals(
    windows,
    qp: float,
    qn: float,
    li_ah: float,
    vmin: float,
    vmax: float,
    positive: OcpCurve,
    negative: OcpCurve,
) -> np.ndarray:
    """Voltage limits, useful-capacity balance and lithium inventory at 0 % SOC."""

    thp0, thp100, thn0, thn100 = windows
    return np.array(
        [
            ocp(positive, thp0) - ocp(negative, thn0) - vmin,
            ocp(positive, thp100) - ocp(negative, thn100) - vmax,
            qp * (thp0 - thp100) - qn * (thn100 - thn0),
            thp0 * qp + thn0 * qn - li_ah,
        ]
    )


def apply_degradation(
    fresh: EsohParams,
    spec: DegradationSpec,
    vmin: float,
    vmax: float,
    positive: OcpCurve,
    negative: OcpCurve,
    *,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> EsohParams:
    """
    Age ``fresh`` by ``spec``.

    Capacities shrink by the LAM percentages, the lithium inventory by LLI, and
    the windows are re-solved for the same voltage limits starting from the
    fresh windows.

    :raises InfeasibleDegradationError: When no windows in ``[0, 1]^4`` fit.
    """

    fresh.validate()
    qp = (1.0 - spec.lam_p / 100.0) * fresh.qp
    qn = (1.0 - spec.lam_n / 100.0) * fresh.qn
    n_li = (1.0 - spec.lli / 100.0) * lithium_inventory(fresh)
    li_ah = n_li * FARADAY / 3600.0

    def fun(x: np.ndarray) -> np.ndarray:
        return degradation_residuals(x, qp, qn, li_ah, vmin, vmax, positive, negative)

    starts = (np.asarray(fresh.windows, dtype=float), np.array([0.9, 0.3, 0.1, 0.8]))
    for x0 in starts:
        result = damped_newton(fun, x0, tol=tol, max_iter=max_iter)
        thp0, thp100, thn0, thn100 = (float(v) for v in result.x)
        inside = all(0.0 <= v <= 1.0 for v in result.x) and thp0 > thp100 and thn100 > thn0
        if result.success and inside:
            aged = EsohParams(qp=qp, qn=qn, thp0=thp0, thp100=thp100, thn0=thn0, thn100=thn100, eta=fresh.eta)
            logger.info(
                "Aged windows for LAM_p=%.1f%% LAM_n=%.1f%% LLI=%.1f%%: thp=[%.4f, %.4f] thn=[%.4f, %.4f]",
                spec.lam_p,
                spec.lam_n,
                spec.lli,
                thp100,
                thp0,
                thn0,
                thn100,
            )
            return aged
        logger.debug("Degradation solve from %s failed: %s", x0, result.message)

    raise InfeasibleDegradationError(
        f"No stoichiometric windows in [0, 1]^4 for LAM_p={spec.lam_p}%, LAM_n={spec.lam_n}%, "
        f"LLI={spec.lli}% within [{vmin:.3f}, {vmax:.3f}] V"
    )
