"""SOL-indexed passive-element tables and their interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, NamedTuple, Sequence

import numpy as np

from electrode_soh.errors import ConfigurationError

__all__ = [
    "ELEMENTS",
    "HalfCellParamTable",
    "RcElements",
    "interpolate_rc",
]

ELEMENTS = ("r0", "r1", "c1", "r2", "c2")

# JSON columns are in the units the tables are usually published in.
_COLUMNS = {
    "r0": ("r0_mohm", 1e-3),
    "r1": ("r1_mohm", 1e-3),
    "c1": ("c1_kf", 1e3),
    "r2": ("r2_mohm", 1e-3),
    "c2": ("c2_kf", 1e3),
}


class RcElements(NamedTuple):
    """Element values at one SOL (ohm and farad)."""

    r0: Any
    r1: Any
    c1: Any
    r2: Any
    c2: Any

    @property
    def tau1(self):
        return self.r1 * self.c1

    @property
    def tau2(self):
        return self.r2 * self.c2


@dataclass(frozen=True, eq=False)
class HalfCellParamTable:
    """
    R0/R1/C1/R2/C2 for one electrode at increasing SOL breakpoints.

    Values are stored in SI units. Construction validates the table and raises
    :class:`ConfigurationError` when it is malformed.
    """

    electrode: str
    breakpoints: np.ndarray
    r0: np.ndarray
    r1: np.ndarray
    c1: np.ndarray
    r2: np.ndarray
    c2: np.ndarray

    def __post_init__(self) -> None:
        for name in ("breakpoints",) + ELEMENTS:
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

        bp = self.breakpoints
        if bp.ndim != 1 or bp.size < 2:
            raise ConfigurationError(f"{self.electrode} table needs at least two breakpoints")
        if np.any(np.diff(bp) <= 0):
            raise ConfigurationError(f"{self.electrode} table breakpoints must be strictly increasing")
        if abs(bp[0]) > 1e-12 or abs(bp[-1] - 1.0) > 1e-12:
            raise ConfigurationError(f"{self.electrode} table breakpoints must span [0, 1]")
        for name in ELEMENTS:
            values = getattr(self, name)
            if values.shape != bp.shape:
                raise ConfigurationError(
                    f"{self.electrode} table column '{name}' has {values.size} values for {bp.size} breakpoints"
                )
            if not np.all(np.isfinite(values)) or np.any(values <= 0):
                raise ConfigurationError(f"{self.electrode} table column '{name}' must be positive")

    def element(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def scaled(self, factors: Mapping[str, Sequence[float] | float]) -> "HalfCellParamTable":
        """Return a copy with each named column multiplied by ``factors[name]``."""

        columns = {name: getattr(self, name) * np.asarray(factors.get(name, 1.0)) for name in ELEMENTS}
        return HalfCellParamTable(self.electrode, self.breakpoints, **columns)

    @classmethod
    def constant(cls, electrode: str, r0: float, r1: float, c1: float, r2: float, c2: float) -> "HalfCellParamTable":
        """Two-breakpoint table with SOL-independent elements."""

        bp = np.array([0.0, 1.0])
        return cls(
            electrode,
            bp,
            np.full(2, r0),
            np.full(2, r1),
            np.full(2, c1),
            np.full(2, r2),
            np.full(2, c2),
        )

    @classmethod
    def from_dict(cls, electrode: str, data: Mapping[str, Any]) -> "HalfCellParamTable":
        try:
            breakpoints = np.asarray(data["sol_pct"], dtype=float) / 100.0
            columns = {
                name: np.asarray(data[key], dtype=float) * scale
                for name, (key, scale) in _COLUMNS.items()
            }
        except KeyError as exc:
            raise ConfigurationError(f"{electrode} table is missing column {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"{electrode} table has non-numeric values: {exc}") from exc
        return cls(electrode, breakpoints, **columns)

    def to_dict(self) -> dict[str, list[float]]:
        out = {"sol_pct": [round(float(b) * 100.0, 10) for b in self.breakpoints]}
        for name, (key, scale) in _COLUMNS.items():
            out[key] = [float(v) / scale for v in getattr(self, name)]
        return out


def interpolate_rc(table: HalfCellParamTable, theta) -> RcElements:
    """
    Piecewise-linear interpolation of every element at ``theta``.

    ``theta`` outside ``[0, 1]`` takes the end values. Arrays are accepted and
    give arrays back.

    :param table: Electrode table.
    :param theta: Stoichiometry (scalar or array).
    :returns: :class:`RcElements` in SI units.
    """

    x = np.clip(np.asarray(theta, dtype=float), 0.0, 1.0)
    values = [np.interp(x, table.breakpoints, getattr(table, name)) for name in ELEMENTS]
    if np.ndim(x) == 0:
        values = [float(v) for v in values]
    return RcElements(*values)
