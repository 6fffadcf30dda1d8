"""
Electrode capacity from ``(delta SOL, delta Ah)`` pairs by approximate weighted
total least squares.

The pairs follow ``y = Q x`` with noise on both coordinates. The merit

    chi(Q) = sum (y_i - Q x_i)^2 (Q^2/var_x_i + 1/var_y_i) / (1 + Q^2)^2

depends on the data through six running moments, and its stationary points
are the roots of a quartic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from electrode_soh.errors import EstimationFailure

logger = logging.getLogger(__name__)

__all__ = [
    "AwtlsAccumulator",
    "CapacityEstimate",
    "HarvestedPair",
    "PairHarvester",
    "push_pair",
    "estimate_capacity",
    "merit",
    "harvest_pairs",
]

_Q = Polynomial([0.0, 1.0])
_ONE_PLUS_Q2 = Polynomial([1.0, 0.0, 1.0])


@dataclass(frozen=True, slots=True)
class AwtlsAccumulator:
    """
    Forgetting-weighted moments of the pushed pairs.

    ``moments`` holds ``(sum x^2/var_y, sum xy/var_y, sum y^2/var_y,
    sum x^2/var_x, sum xy/var_x, sum y^2/var_x)``.
    """

    gamma: float = 0.999
    floor: float = 0.05
    moments: Tuple[float, float, float, float, float, float] = (0.0,) * 6
    count: int = 0
    discarded: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.gamma <= 1:
            raise ValueError(f"Forgetting factor must lie in (0, 1], got {self.gamma}")
        if self.floor < 0:
            raise ValueError("The delta-SOL floor must be non-negative")

    @classmethod
    def seeded(
        cls,
        q_init: float,
        var_x: float,
        var_y: float,
        *,
        gamma: float = 0.999,
        floor: float = 0.05,
    ) -> "AwtlsAccumulator":
        """Start from a single prior pair ``(1, q_init)``."""

        acc = cls(gamma=gamma, floor=floor)
        return push_pair(acc, 1.0, q_init, var_x, var_y)

    def numerator(self) -> Polynomial:
        """``chi(Q) * (1 + Q^2)^2`` as a polynomial in ``Q``."""

        c1, c2, c3, c4, c5, c6 = self.moments
        return Polynomial([c3, -2.0 * c2, c1 + c6, -2.0 * c5, c4])


def push_pair(acc: AwtlsAccumulator, dtheta: float, dah: float, var_x: float, var_y: float) -> AwtlsAccumulator:
    """
    Fold one pair into the moments after applying the forgetting factor.

    Pairs with ``|dtheta|`` below the floor leave the moments untouched and are
    counted as discarded.

    :raises ValueError: If a variance is not positive.
    """

    if not (var_x > 0 and var_y > 0):
        raise ValueError(f"Pair variances must be positive (var_x={var_x}, var_y={var_y})")
    if abs(dtheta) < acc.floor:
        logger.debug("Pair discarded: |dtheta|=%.4f below floor %.3f", abs(dtheta), acc.floor)
        return replace(acc, discarded=acc.discarded + 1)

    x, y, g = float(dtheta), float(dah), acc.gamma
    terms = (
        x * x / var_y,
        x * y / var_y,
        y * y / var_y,
        x * x / var_x,
        x * y / var_x,
        y * y / var_x,
    )
    moments = tuple(g * m + t for m, t in zip(acc.moments, terms))
    return replace(acc, moments=moments, count=acc.count + 1)


def merit(acc: AwtlsAccumulator, q):
    """Evaluate the weighted merit at ``q`` (scalar or array)."""

    q = np.asarray(q, dtype=float)
    return acc.numerator()(q) / (1.0 + q * q) ** 2


class CapacityEstimate(NamedTuple):
    q: float
    sigma: float


def _stationary(acc: AwtlsAccumulator) -> Polynomial:
    # numerator of d(chi)/dQ over (1 + Q^2)^3; the Q^5 terms cancel
    num = acc.numerator()
    poly = num.deriv() * _ONE_PLUS_Q2 - 4.0 * _Q * num
    return poly.trim(tol=0.0)


def _polish(poly: Polynomial, root: float, steps: int = 3) -> float:
    d = poly.deriv()
    for _ in range(steps):
        slope = d(root)
        if slope == 0:
            break
        root -= poly(root) / slope
    return root


def estimate_capacity(acc: AwtlsAccumulator, previous: Optional[float] = None) -> CapacityEstimate:
    """
    Minimise the merit over the positive real roots of its stationarity quartic.

    The quartic is solved through companion-matrix eigenvalues and each real
    root is polished by Newton steps. Equal merits go to the root nearest
    ``previous``. The standard deviation is ``sqrt(2/H)`` with ``H`` the merit's
    second derivative at the minimiser.

    :raises EstimationFailure: When there is no data or no positive real root.
    """

    if acc.count < 1:
        raise EstimationFailure("No pairs accumulated")

    poly = _stationary(acc)
    if poly.degree() < 1 or not np.any(poly.coef):
        raise EstimationFailure("Stationarity polynomial is degenerate")

    roots = poly.roots()
    real = [r.real for r in roots if abs(r.imag) <= 1e-6 * max(1.0, abs(r))]
    candidates = [_polish(poly, r) for r in real]
    candidates = [r for r in candidates if r > 0 and np.isfinite(r)]
    if not candidates:
        raise EstimationFailure("No positive real root of the merit stationarity polynomial")

    # chi >= 0; cancellation in the moments can push a near-exact fit below zero
    values = np.maximum([merit(acc, r) for r in candidates], 0.0)
    best = float(np.min(values))
    tol = 1e-12 * max(float(np.sum(np.abs(acc.moments))), 1.0)
    tied = [r for r, v in zip(candidates, values) if v <= best + tol]
    if previous is not None and len(tied) > 1:
        q_hat = min(tied, key=lambda r: abs(r - previous))
    else:
        q_hat = tied[0]

    # at a stationary point chi'' = poly'(Q) / (1 + Q^2)^3
    hessian = poly.deriv()(q_hat) / (1.0 + q_hat * q_hat) ** 3
    sigma = float(np.sqrt(2.0 / hessian)) if hessian > 0 else float("inf")
    return CapacityEstimate(float(q_hat), sigma)


@dataclass(frozen=True, slots=True)
class HarvestedPair:
    """One window's change in SOL and charge for one electrode."""

    electrode: str
    t_start: float
    t_end: float
    dtheta: float
    dah: float
    var_x: float
    var_y: float


class PairHarvester:
    """
    Cut a sample stream into non-overlapping windows of ``window_s`` seconds.

    Each completed window yields one positive and one negative pair. The charge
    is the coulomb count of the inputs applied between the window's end samples;
    the negative pair uses the negated charge so both slopes are positive.

    :param window_s: Window length in data seconds.
    :param current_noise_std: Current-sensor noise (A) used for the charge variance.
    :param eta: Coulombic efficiency.
    """

    def __init__(self, window_s: float = 1800.0, current_noise_std: float = 0.01, eta: float = 1.0) -> None:
        if not window_s > 0:
            raise ValueError(f"window_s must be positive, got {window_s}")
        self.window_s = float(window_s)
        self.current_noise_std = float(current_noise_std)
        self.eta = float(eta)
        self._start: Optional[Tuple[float, float, float, float, float]] = None
        self._ah = 0.0
        self._samples = 0

    def reset(self) -> None:
        self._start = None
        self._ah = 0.0
        self._samples = 0

    def push(
        self,
        t_s: float,
        thp: float,
        thn: float,
        var_p: float,
        var_n: float,
        applied_current: float = 0.0,
        dt: float = 0.0,
    ) -> List[HarvestedPair]:
        """
        Add one sample.

        :param applied_current: Current held since the previous sample (A).
        :param dt: Time since the previous sample (s).
        :returns: The pairs completed by this sample (empty or two).
        """

        if self._start is None:
            self._start = (t_s, thp, thn, var_p, var_n)
            self._ah = 0.0
            self._samples = 1
            return []

        self._ah += self.eta * applied_current * dt / 3600.0
        self._samples += 1
        t0, thp0, thn0, var_p0, var_n0 = self._start
        if t_s - t0 < self.window_s:
            return []

        pairs: List[HarvestedPair] = []
        if self._samples >= 2:
            var_y = max((self.current_noise_std * (t_s - t0) / 3600.0) ** 2, 1e-12)
            pairs = [
                HarvestedPair("positive", t0, t_s, thp - thp0, self._ah, max(var_p0 + var_p, 1e-12), var_y),
                HarvestedPair("negative", t0, t_s, thn - thn0, -self._ah, max(var_n0 + var_n, 1e-12), var_y),
            ]
        self._start = (t_s, thp, thn, var_p, var_n)
        self._ah = 0.0
        self._samples = 1
        return pairs


def harvest_pairs(
    t: Sequence[float],
    thp: Sequence[float],
    thn: Sequence[float],
    current: Sequence[float],
    window_s: float,
    *,
    var_p: Optional[Sequence[float]] = None,
    var_n: Optional[Sequence[float]] = None,
    current_noise_std: float = 0.01,
    eta: float = 1.0,
) -> List[HarvestedPair]:
    """
    Batch form of :class:`PairHarvester` over aligned series.

    ``current[k]`` is the input held from ``t[k]`` to ``t[k + 1]``.
    """

    t = np.asarray(t, dtype=float)
    n = t.size
    var_p = np.zeros(n) if var_p is None else np.asarray(var_p, dtype=float)
    var_n = np.zeros(n) if var_n is None else np.asarray(var_n, dtype=float)
    current = np.asarray(current, dtype=float)

    harvester = PairHarvester(window_s, current_noise_std, eta)
    pairs: List[HarvestedPair] = []
    for k in range(n):
        applied = current[k - 1] if k else 0.0
        dt = t[k] - t[k - 1] if k else 0.0
        pairs.extend(harvester.push(t[k], thp[k], thn[k], var_p[k], var_n[k], applied, dt))
    return pairs
