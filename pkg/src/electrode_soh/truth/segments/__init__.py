"""
Auto-discovery & registry for current-profile segment kinds.

Any file inside ``truth/segments/`` that defines::

    from . import register

    @register
    class MySegment:
        kind = "ramp"
        @staticmethod
        def generate(segment, dt, rng, nominal_capacity_ah): ...

is picked up automatically at import-time.

``generate`` returns the open-loop current samples (A, discharge positive)
for the full segment; the simulator truncates them at the termination voltage.
"""

from __future__ import annotations

from importlib import import_module
from pathlib import Path
from pkgutil import iter_modules
from typing import TYPE_CHECKING, ClassVar, Dict, Optional, Protocol

import numpy as np

if TYPE_CHECKING:
    from ..profiles import SegmentSpec

__all__ = ["SegmentKind", "register", "get", "kinds"]

# ------------------------------------------------------------------ #
# 1.  Registry contract + decorator
# ------------------------------------------------------------------ #


class SegmentKind(Protocol):
    kind: ClassVar[str]  # unique key, e.g. "drive"

    @staticmethod
    def generate(
        segment: "SegmentSpec",
        dt: float,
        rng: np.random.Generator,
        nominal_capacity_ah: Optional[float],
    ) -> np.ndarray:
        """Current samples for the whole segment."""


_REGISTRY: Dict[str, SegmentKind] = {}


def register(cls: SegmentKind):
    """
    Decorator that stores the segment kind in the global registry.

    :param cls: Segment class to register.
    :returns: The class unchanged.
    """
    if cls.kind in _REGISTRY:
        raise ValueError(f"Segment kind '{cls.kind}' already registered")
    _REGISTRY[cls.kind] = cls
    return cls


def get(kind: str) -> SegmentKind | None:
    """Return the segment class for ``kind`` or ``None``."""
    return _REGISTRY.get(kind)


def kinds() -> list[str]:
    return sorted(_REGISTRY)


def samples(duration_s: float, dt: float) -> int:
    """Number of whole samples in ``duration_s``."""
    return max(int(round(duration_s / dt)), 0)


def amps(value: float, unit: str, nominal_capacity_ah: Optional[float]) -> float:
    """Convert ``value`` in ``unit`` ("A" or "C") to amperes."""
    if unit == "A":
        return float(value)
    if unit == "C":
        if not nominal_capacity_ah:
            raise ValueError("C-rate segments need nominal_capacity_ah")
        return float(value) * nominal_capacity_ah
    raise ValueError(f"Unknown current unit '{unit}'")


# ------------------------------------------------------------------ #
# 2.  Auto-import every sibling module (plug-n-play)
# ------------------------------------------------------------------ #

_pkg_path = Path(__file__).resolve().parent
for _, modname, _ in iter_modules([str(_pkg_path)]):
    if modname != "__init__":
        import_module(f"{__name__}.{modname}")
