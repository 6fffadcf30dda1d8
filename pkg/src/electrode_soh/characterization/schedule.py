"""HPPC test schedules that step one electrode through its SOL range."""

from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np

from electrode_soh.model.eecm import sol_direction
from electrode_soh.truth.profiles import ProfileSpec, SegmentSpec

logger = logging.getLogger(__name__)

__all__ = ["hppc_schedule", "schedule_targets"]


def schedule_targets(sol_lo: float, sol_hi: float, step: float = 0.1, margin: float = 0.003) -> np.ndarray:
    """
    SOL level of each pulse block.

    Levels run from ``sol_lo`` to ``sol_hi`` in ``step`` increments and are kept
    ``margin`` away from 0 and 1 so a pulse cannot push the SOL out of range.

    :raises ValueError: On an empty or out-of-range interval or a nonpositive step.
    """

    if not 0.0 <= sol_lo <= sol_hi <= 1.0:
        raise ValueError(f"SOL range [{sol_lo}, {sol_hi}] must be ordered inside [0, 1]")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(round((sol_hi - sol_lo) / step))
    targets = sol_lo + step * np.arange(n + 1)
    return np.clip(targets, margin, 1.0 - margin)


def hppc_schedule(
    sol_lo: float,
    sol_hi: float,
    pulse_crate: float = 1.0,
    rest_s: float = 1800.0,
    *,
    step: float = 0.1,
    electrode: str = "positive",
    q_ah: Optional[float] = None,
    move_crate: float = 0.5,
    pulse_s: float = 10.0,
    relax_s: float = 600.0,
    dt: float = 1.0,
    margin: float = 0.003,
) -> ProfileSpec:
    """
    Alternating rest and pulse blocks stepping the SOL from ``sol_lo`` to ``sol_hi``.

    Each block is a settling rest followed by a discharge/charge pulse pair;
    constant-current moves between blocks shift the SOL by ``step``. C-rates
    refer to the electrode capacity ``q_ah``.

    :param electrode: Sets the move direction (SOL rises with discharge on the positive side).
    :returns: A noise-free :class:`ProfileSpec`.
    """

    targets = schedule_targets(sol_lo, sol_hi, step, margin)
    direction = sol_direction(electrode)
    segments: List[SegmentSpec] = []
    for k, target in enumerate(targets):
        if k:
            delta = float(target - targets[k - 1])
            segments.append(
                SegmentSpec(
                    kind="cc",
                    magnitude=direction * move_crate,
                    duration_s=delta * 3600.0 / move_crate,
                    unit="C",
                )
            )
        segments.append(SegmentSpec(kind="rest", duration_s=rest_s))
        segments.append(SegmentSpec(kind="hppc", magnitude=pulse_crate, unit="C", pulse_s=pulse_s, relax_s=relax_s))

    logger.debug("HPPC schedule with %d block(s) over SOL [%.3f, %.3f]", len(targets), targets[0], targets[-1])
    return ProfileSpec(segments=segments, dt=dt, noise_std=0.0, nominal_capacity_ah=q_ah)
