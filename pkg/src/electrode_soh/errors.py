"""Exception hierarchy shared by the library and the command-line interface."""

from __future__ import annotations

from typing import Sequence

__all__ = [
    "ElectrodeSohError",
    "ConfigurationError",
    "DataError",
    "InfeasibleDegradationError",
    "CovarianceDegenerateError",
    "NumericalDegeneracyError",
    "EstimationFailure",
    "SolverFailure",
    "FittingError",
]


class ElectrodeSohError(Exception):
    """Base class for every error raised by :mod:`electrode_soh`."""

    pass


class ConfigurationError(ElectrodeSohError, ValueError):
    """Raised for malformed parameter packs, run configs or degenerate windows."""

    pass


class DataError(ElectrodeSohError):
    """Raised when an input data file cannot be interpreted."""

    def __init__(self, message: str, *, row: int | None = None) -> None:
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class InfeasibleDegradationError(ElectrodeSohError):
    """Raised when no stoichiometric window in [0, 1]^4 matches a degradation spec."""

    pass


class CovarianceDegenerateError(ElectrodeSohError):
    """Raised when a covariance stays non positive-definite after jittering."""

    pass


class NumericalDegeneracyError(ElectrodeSohError):
    """Raised when the innovation variance of a filter update is not positive."""

    pass


class EstimationFailure(ElectrodeSohError):
    """Raised when the capacity regression has no admissible root."""

    pass


class SolverFailure(ElectrodeSohError):
    """Raised when the Newton kernel fails to converge."""

    pass


class FittingError(ElectrodeSohError):
    """Raised when a half-cell dataset cannot be fitted."""

    def __init__(self, message: str, *, uncovered: Sequence[float] = ()) -> None:
        if uncovered:
            listing = ", ".join(f"{b:.2f}" for b in uncovered)
            message = f"{message} (uncovered breakpoints: {listing})"
        super().__init__(message)
        self.uncovered = tuple(uncovered)
