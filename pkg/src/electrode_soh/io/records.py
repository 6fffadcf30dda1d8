"""The sample type shared by the loaders, the simulator and the estimator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

__all__ = ["CyclingRecord"]


@dataclass(frozen=True, slots=True)
class CyclingRecord:
    """One timestamped sample: current (A, discharge > 0), terminal voltage (V), optional temperature."""

    t_s: float
    current_a: float
    voltage_v: float
    temperature_c: Optional[float] = None
