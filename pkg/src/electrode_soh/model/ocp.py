"""Open-circuit potential curves for the two electrodes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Tuple

import numpy as np

from electrode_soh.errors import ConfigurationError

__all__ = [
    "ELECTRODES",
    "OcpCurve",
    "TanhTerm",
    "ocp",
    "negative_ocp",
    "positive_ocp",
    "affine_ocp",
]

ELECTRODES = ("negative", "positive")


@dataclass(frozen=True, slots=True)
class TanhTerm:
    """One ``weight * tanh(steepness * (theta - center))`` contribution."""

    weight: float
    steepness: float
    center: float


@dataclass(frozen=True, slots=True)
class OcpCurve:
    """
    Closed-form electrode potential

    ``U(theta) = amplitude*exp(-decay*theta) + slope*theta + offset + sum(tanh terms)``.

    A curve with no exponential and no tanh terms is affine.
    """

    electrode: str
    offset: float
    slope: float = 0.0
    amplitude: float = 0.0
    decay: float = 0.0
    terms: Tuple[TanhTerm, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.electrode not in ELECTRODES:
            raise ConfigurationError(f"Unknown electrode '{self.electrode}'")

    @property
    def is_affine(self) -> bool:
        return self.amplitude == 0.0 and not self.terms

    def __call__(self, theta):
        return ocp(self, theta)

    @classmethod
    def from_dict(cls, electrode: str, data: Mapping[str, Any]) -> "OcpCurve":
        try:
            terms = tuple(
                TanhTerm(float(t["weight"]), float(t["steepness"]), float(t["center"]))
                for t in data.get("tanh", [])
            )
            return cls(
                electrode=electrode,
                offset=float(data["offset"]),
                slope=float(data.get("slope", 0.0)),
                amplitude=float(data.get("amplitude", 0.0)),
                decay=float(data.get("decay", 0.0)),
                terms=terms,
            )
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"Malformed {electrode} OCP block: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        return {
            "amplitude": self.amplitude,
            "decay": self.decay,
            "slope": self.slope,
            "offset": self.offset,
            "tanh": [
                {"weight": t.weight, "steepness": t.steepness, "center": t.center}
                for t in self.terms
            ],
        }


def ocp(curve: OcpCurve, theta):
    """
    Evaluate ``curve`` at ``theta``.

    Total on the reals, so sigma points slightly outside ``[0, 1]`` are fine.

    :param curve: Electrode curve.
    :param theta: Scalar or array of stoichiometries.
    :returns: Potential(s) in volts, matching the input shape.
    """

    x = np.asarray(theta, dtype=float)
    value = curve.offset + curve.slope * x
    if curve.amplitude:
        value = value + curve.amplitude * np.exp(-curve.decay * x)
    for term in curve.terms:
        value = value + term.weight * np.tanh(term.steepness * (x - term.center))
    if np.ndim(value) == 0:
        return float(value)
    return value


def negative_ocp() -> OcpCurve:
    """Graphite-SiOx negative electrode curve."""

    return OcpCurve(
        electrode="negative",
        amplitude=1.9793,
        decay=39.3631,
        offset=0.2482,
        terms=(
            TanhTerm(-0.0909, 29.8538, 0.1234),
            TanhTerm(-0.04478, 14.9159, 0.2769),
            TanhTerm(-0.0205, 30.4444, 0.6103),
        ),
    )


def positive_ocp() -> OcpCurve:
    """NMC811 positive electrode curve."""

    return OcpCurve(
        electrode="positive",
        slope=-0.809,
        offset=4.4875,
        terms=(
            TanhTerm(-0.0428, 18.5138, 0.5542),
            TanhTerm(-17.7326, 15.789, 0.3117),
            TanhTerm(17.5842, 15.9308, 0.312),
        ),
    )


def affine_ocp(electrode: str, offset: float, slope: float) -> OcpCurve:
    """Straight-line stub, handy when the output map has to be linear."""

    return OcpCurve(electrode=electrode, offset=offset, slope=slope)
