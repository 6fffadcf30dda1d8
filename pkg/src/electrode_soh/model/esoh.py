"""Electrode state-of-health parameters and the SOL/SOC maps."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Mapping, Tuple

from electrode_soh.errors import ConfigurationError

__all__ = [
    "FARADAY",
    "EsohParams",
    "capacity_from_geometry",
    "soc_from_sol",
    "sol_from_soc",
    "useful_capacity",
]

FARADAY = 96485.0  # C/mol

_BALANCE_TOL_AH = 1e-6


@dataclass(frozen=True, slots=True)
class EsohParams:
    """Electrode capacities (Ah), window endpoints and coulombic efficiency."""

    qp: float
    qn: float
    thp0: float
    thp100: float
    thn0: float
    thn100: float
    eta: float = 1.0

    @property
    def windows(self) -> Tuple[float, float, float, float]:
        """``(thp0, thp100, thn0, thn100)``."""

        return (self.thp0, self.thp100, self.thn0, self.thn100)

    def with_windows(self, thp0: float, thp100: float, thn0: float, thn100: float) -> "EsohParams":
        return replace(self, thp0=thp0, thp100=thp100, thn0=thn0, thn100=thn100)

    def with_capacities(self, qp: float, qn: float) -> "EsohParams":
        return replace(self, qp=qp, qn=qn)

    def capacity(self, electrode: str) -> float:
        return self.qp if electrode == "positive" else self.qn

    def validate(self, *, balance_tol: float | None = _BALANCE_TOL_AH) -> "EsohParams":
        """
        Raise :class:`ConfigurationError` unless every invariant holds.

        :param balance_tol: Allowed useful-capacity mismatch (Ah); ``None`` skips the check.
        :returns: ``self`` for chaining.
        """

        if not (self.qp > 0 and self.qn > 0):
            raise ConfigurationError(f"Electrode capacities must be positive (qp={self.qp}, qn={self.qn})")
        if not (0 < self.eta <= 1):
            raise ConfigurationError(f"Coulombic efficiency must lie in (0, 1], got {self.eta}")
        for name, value in zip(("thp0", "thp100", "thn0", "thn100"), self.windows):
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name}={value} outside [0, 1]")
        if not self.thp0 > self.thp100:
            raise ConfigurationError("Positive window must satisfy thp0 > thp100")
        if not self.thn100 > self.thn0:
            raise ConfigurationError("Negative window must satisfy thn100 > thn0")
        if balance_tol is not None:
            mismatch = abs(useful_capacity(self, "positive") - useful_capacity(self, "negative"))
            if mismatch > balance_tol:
                raise ConfigurationError(f"Useful capacities disagree by {mismatch:.3g} Ah")
        return self

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EsohParams":
        try:
            return cls(
                qp=float(data["qp_ah"]),
                qn=float(data["qn_ah"]),
                thp0=float(data["thp0"]),
                thp100=float(data["thp100"]),
                thn0=float(data["thn0"]),
                thn100=float(data["thn100"]),
                eta=float(data.get("eta", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"Malformed eSOH block: {exc}") from exc

    def to_dict(self) -> dict[str, float]:
        return {
            "qp_ah": self.qp,
            "qn_ah": self.qn,
            "thp0": self.thp0,
            "thp100": self.thp100,
            "thn0": self.thn0,
            "thn100": self.thn100,
            "eta": self.eta,
        }


def useful_capacity(esoh: EsohParams, electrode: str = "positive") -> float:
    """Capacity between 0 % and 100 % SOC seen from one electrode (Ah)."""

    if electrode == "positive":
        return esoh.qp * (esoh.thp0 - esoh.thp100)
    return esoh.qn * (esoh.thn100 - esoh.thn0)


def soc_from_sol(esoh: EsohParams, thn):
    """
    SOC from the negative-electrode SOL.

    :raises ConfigurationError: When the negative window is degenerate.
    """

    span = esoh.thn100 - esoh.thn0
    if span == 0:
        raise ConfigurationError("Degenerate negative window (thn100 == thn0)")
    return (thn - esoh.thn0) / span


def sol_from_soc(esoh: EsohParams, soc) -> Tuple[Any, Any]:
    """
    Electrode SOLs ``(thp, thn)`` at ``soc``.

    :raises ConfigurationError: When either window is degenerate.
    """

    if esoh.thn100 == esoh.thn0 or esoh.thp0 == esoh.thp100:
        raise ConfigurationError("Degenerate stoichiometric window")
    thp = esoh.thp0 + soc * (esoh.thp100 - esoh.thp0)
    thn = esoh.thn0 + soc * (esoh.thn100 - esoh.thn0)
    return thp, thn


def capacity_from_geometry(eps_s: float, thickness_m: float, area_m2: float, cs_max: float) -> float:
    """
    Theoretical electrode capacity ``F * eps_s * L * A * cs_max / 3600``.

    :param eps_s: Active-material volume fraction.
    :param thickness_m: Electrode thickness (m).
    :param area_m2: Electrode area (m^2).
    :param cs_max: Maximum lithium concentration (mol/m^3).
    :returns: Capacity in Ah.
    :raises ValueError: If any input is not strictly positive.
    """

    for name, value in (("eps_s", eps_s), ("thickness", thickness_m), ("area", area_m2), ("cs_max", cs_max)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    return FARADAY * eps_s * thickness_m * area_m2 * cs_max / 3600.0
