"""Segment-based current profiles."""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Any, List, Mapping, Optional, Sequence

import numpy as np

from electrode_soh.errors import ConfigurationError

from . import segments

logger = logging.getLogger(__name__)

__all__ = [
    "SegmentSpec",
    "ProfileSpec",
    "CurrentProfile",
    "generate_profile",
    "segment_rngs",
    "segment_current",
    "noise_rng",
]

_SEGMENT_KEYS = {
    "kind",
    "magnitude",
    "duration_s",
    "termination_v",
    "unit",
    "rms",
    "regen_fraction",
    "bandwidth_hz",
    "pulse_s",
    "relax_s",
}


@dataclass(frozen=True, slots=True)
class SegmentSpec:
    """
    One block of the profile.

    ``magnitude`` is in amperes or C-rate (``unit``), positive on discharge.
    ``termination_v`` ends the segment early: discharge-type segments stop at
    ``v <= termination_v`` and charge-type segments at ``v >= termination_v``.
    """

    kind: str
    magnitude: float = 0.0
    duration_s: float = 0.0
    termination_v: Optional[float] = None
    unit: str = "A"
    rms: Optional[float] = None
    regen_fraction: float = 0.2
    bandwidth_hz: float = 0.05
    pulse_s: float = 10.0
    relax_s: float = 40.0

    def __post_init__(self) -> None:
        if segments.get(self.kind) is None:
            raise ConfigurationError(f"Unknown segment kind '{self.kind}' (known: {segments.kinds()})")
        if self.duration_s < 0:
            raise ConfigurationError("Segment duration must be non-negative")
        if self.unit not in ("A", "C"):
            raise ConfigurationError(f"Segment unit must be 'A' or 'C', got {self.unit!r}")
        if not 0.0 <= self.regen_fraction < 1.0:
            raise ConfigurationError("regen_fraction must lie in [0, 1)")

    @property
    def charging(self) -> bool:
        """Charge-type segments terminate on a rising voltage."""

        return self.kind == "cc" and self.magnitude < 0

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SegmentSpec":
        unknown = set(data) - _SEGMENT_KEYS
        if unknown:
            raise ConfigurationError(f"Unknown segment keys {sorted(unknown)}")
        if "kind" not in data:
            raise ConfigurationError("Segment needs a 'kind'")
        return cls(**dict(data))


@dataclass(frozen=True, slots=True)
class ProfileSpec:
    """Segments, sample period (s), voltage noise (V) and the seed."""

    segments: Sequence[SegmentSpec] = field(default_factory=tuple)
    dt: float = 1.0
    noise_std: float = 1e-3
    seed: int = 0
    repeat: int = 1
    nominal_capacity_ah: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.noise_std < 0:
            raise ConfigurationError("noise_std must be non-negative")
        if self.repeat < 1:
            raise ConfigurationError("repeat must be at least 1")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def expanded(self) -> List[SegmentSpec]:
        """Segment list with ``repeat`` applied."""

        return list(self.segments) * self.repeat

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProfileSpec":
        try:
            segs = [SegmentSpec.from_dict(s) for s in data.get("segments", [])]
            return cls(
                segments=segs,
                dt=float(data.get("dt", 1.0)),
                noise_std=float(data.get("noise_std", 1e-3)),
                seed=int(data.get("seed", 0)),
                repeat=int(data.get("repeat", 1)),
                nominal_capacity_ah=data.get("nominal_capacity_ah"),
            )
        except TypeError as exc:
            raise ConfigurationError(f"Malformed profile: {exc}") from exc


@dataclass(frozen=True, eq=False)
class CurrentProfile:
    """Sample times (s), currents (A) and the index of the segment each sample belongs to."""

    t: np.ndarray
    current: np.ndarray
    segment: np.ndarray

    def __len__(self) -> int:
        return int(self.current.size)


def segment_rngs(spec: ProfileSpec) -> List[np.random.Generator]:
    """One independent generator per expanded segment, all derived from ``spec.seed``."""

    children = np.random.SeedSequence(spec.seed).spawn(len(spec.expanded))
    return [np.random.default_rng(child) for child in children]


def segment_current(spec: ProfileSpec, index: int, rng: np.random.Generator) -> np.ndarray:
    seg = spec.expanded[index]
    return np.asarray(
        segments.get(seg.kind).generate(seg, spec.dt, rng, spec.nominal_capacity_ah),
        dtype=float,
    )


def generate_profile(spec: ProfileSpec | None) -> CurrentProfile:
    """
    Open-loop current series for ``spec``; no termination is applied.

    :raises ValueError: When ``spec`` is missing.
    """

    if spec is None:
        raise ValueError("A profile spec is required")

    parts, owners = [], []
    for index, rng in enumerate(segment_rngs(spec)):
        current = segment_current(spec, index, rng)
        parts.append(current)
        owners.append(np.full(current.size, index, dtype=int))

    if not parts:
        empty = np.zeros(0)
        return CurrentProfile(empty, empty.copy(), np.zeros(0, dtype=int))

    current = np.concatenate(parts)
    logger.debug("Generated %d samples over %d segments", current.size, len(parts))
    return CurrentProfile(
        t=np.arange(current.size) * spec.dt,
        current=current,
        segment=np.concatenate(owners),
    )


def noise_rng(spec: ProfileSpec, seed: Optional[int] = None) -> np.random.Generator:
    """Generator for measurement noise, independent of every segment generator."""

    base = spec.seed if seed is None else seed
    child = np.random.SeedSequence(base).spawn(len(spec.expanded) + 1)[-1]
    return np.random.default_rng(child)
