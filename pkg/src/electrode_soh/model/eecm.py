"""
Electrode-level equivalent circuit.

Each electrode is a series resistance plus two RC branches around its OCP;
the cell voltage is the difference of the two electrode potentials. Current is
positive on discharge: the positive electrode lithiates (SOL rises) and the
negative electrode delithiates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import logging
from typing import TYPE_CHECKING, Tuple

import numpy as np

from .esoh import EsohParams
from .ocp import OcpCurve, ocp
from .tables import HalfCellParamTable, interpolate_rc

if TYPE_CHECKING:
    from .pack import ParameterPack

logger = logging.getLogger(__name__)

__all__ = [
    "EecmState",
    "sol_direction",
    "rc_discretize",
    "half_cell_potential",
    "electrode_potential",
    "cell_voltage",
    "step_state",
    "simulate_half_cell",
]


@dataclass(frozen=True, slots=True)
class EecmState:
    """Branch voltages (V) and SOLs of both electrodes."""

    vc1p: float = 0.0
    vc2p: float = 0.0
    vc1n: float = 0.0
    vc2n: float = 0.0
    thp: float = 0.5
    thn: float = 0.5
    clamp_count: int = 0

    def branch(self, electrode: str) -> Tuple[float, float, float]:
        """``(vC1, vC2, theta)`` for ``electrode``."""

        if electrode == "positive":
            return self.vc1p, self.vc2p, self.thp
        return self.vc1n, self.vc2n, self.thn


def sol_direction(electrode: str) -> float:
    """+1 when the SOL rises with discharge current, -1 otherwise."""

    return 1.0 if electrode == "positive" else -1.0


def rc_discretize(r, c, dt: float):
    """
    Exact zero-order-hold coefficients of ``dv/dt = -v/(RC) + i/C``.

    :returns: ``(a, b)`` with ``v[k+1] = a*v[k] + b*i[k]``.
    """

    a = np.exp(-dt / (np.asarray(r) * np.asarray(c)))
    b = np.asarray(r) * (1.0 - a)
    if np.ndim(a) == 0:
        return float(a), float(b)
    return a, b


def half_cell_potential(
    electrode: str,
    curve: OcpCurve,
    table: HalfCellParamTable,
    theta,
    vc1,
    vc2,
    current,
):
    """
    Vectorised electrode potential.

    Positive: ``U - vC1 - vC2 - R0*i``; negative: ``U + vC1 + vC2 + R0*i``.
    R0 is interpolated at ``theta``.
    """

    r0 = interpolate_rc(table, theta).r0
    return ocp(curve, theta) - sol_direction(electrode) * (vc1 + vc2 + r0 * current)


def electrode_potential(electrode: str, state: EecmState, pack: "ParameterPack", current: float) -> float:
    """Potential of one electrode for ``state`` at ``current`` (A, discharge > 0)."""

    vc1, vc2, theta = state.branch(electrode)
    return half_cell_potential(electrode, pack.curve(electrode), pack.table(electrode), theta, vc1, vc2, current)


def cell_voltage(state: EecmState, pack: "ParameterPack", current: float) -> float:
    """Terminal voltage ``v_p - v_n``."""

    return electrode_potential("positive", state, pack, current) - electrode_potential(
        "negative", state, pack, current
    )


def _step_electrode(
    electrode: str,
    table: HalfCellParamTable,
    q_ah: float,
    eta: float,
    vc1: float,
    vc2: float,
    theta: float,
    current: float,
    dt: float,
) -> Tuple[float, float, float]:
    rc = interpolate_rc(table, theta)
    a1, b1 = rc_discretize(rc.r1, rc.c1, dt)
    a2, b2 = rc_discretize(rc.r2, rc.c2, dt)
    theta_next = theta + sol_direction(electrode) * eta * current * dt / (3600.0 * q_ah)
    return a1 * vc1 + b1 * current, a2 * vc2 + b2 * current, theta_next


def step_state(
    state: EecmState,
    pack: "ParameterPack",
    esoh: EsohParams,
    current: float,
    dt: float,
) -> EecmState:
    """
    Propagate ``state`` over ``dt`` seconds under constant ``current``.

    Elements are taken at the SOL at the start of the step. SOLs are clamped to
    ``[0, 1]`` afterwards and each clamp increments ``clamp_count``.

    :raises ValueError: If ``dt`` is not positive.
    """

    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")

    v1p, v2p, thp = _step_electrode(
        "positive", pack.table("positive"), esoh.qp, esoh.eta, state.vc1p, state.vc2p, state.thp, current, dt
    )
    v1n, v2n, thn = _step_electrode(
        "negative", pack.table("negative"), esoh.qn, esoh.eta, state.vc1n, state.vc2n, state.thn, current, dt
    )

    clamps = state.clamp_count
    if not 0.0 <= thp <= 1.0:
        thp = min(max(thp, 0.0), 1.0)
        clamps += 1
    if not 0.0 <= thn <= 1.0:
        thn = min(max(thn, 0.0), 1.0)
        clamps += 1
    if clamps != state.clamp_count:
        logger.debug("SOL clamped (total clamps %d)", clamps)

    return replace(state, vc1p=v1p, vc2p=v2p, vc1n=v1n, vc2n=v2n, thp=thp, thn=thn, clamp_count=clamps)


def simulate_half_cell(
    electrode: str,
    curve: OcpCurve,
    table: HalfCellParamTable,
    q_ah: float,
    theta0: float,
    current: np.ndarray,
    dt: np.ndarray | float,
    *,
    eta: float = 1.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Run one electrode through ``current`` starting from rest at ``theta0``.

    Sample ``k`` reports the potential at ``current[k]`` before the step that
    holds ``current[k]`` for ``dt[k]``.

    :returns: ``(potential, theta)`` arrays aligned with ``current``.
    """

    current = np.asarray(current, dtype=float)
    steps = np.broadcast_to(np.asarray(dt, dtype=float), current.shape)
    potential = np.empty_like(current)
    thetas = np.empty_like(current)

    vc1 = vc2 = 0.0
    theta = float(theta0)
    for k, (i_k, dt_k) in enumerate(zip(current, steps)):
        thetas[k] = theta
        potential[k] = half_cell_potential(electrode, curve, table, theta, vc1, vc2, i_k)
        if dt_k > 0:
            vc1, vc2, theta = _step_electrode(electrode, table, q_ah, eta, vc1, vc2, theta, i_k, dt_k)
            theta = min(max(theta, 0.0), 1.0)
    return potential, thetas
