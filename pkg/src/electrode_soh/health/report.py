"""Degradation modes and state of health from eSOH parameters."""

from __future__ import annotations

from dataclasses import asdict, dataclass
import logging

from electrode_soh.errors import ConfigurationError
from electrode_soh.model.esoh import FARADAY, EsohParams, sol_from_soc, useful_capacity

logger = logging.getLogger(__name__)

__all__ = [
    "REPORT_COLUMNS",
    "HealthReport",
    "assess",
    "cell_capacity",
    "lam",
    "lithium_inventory",
    "lli",
    "soh",
]

REPORT_COLUMNS = ("t_s", "lam_p_pct", "lam_n_pct", "lli_pct", "q_cell_ah", "soh", "n_li_mol")


@dataclass(frozen=True, slots=True)
class HealthReport:
    """LAM per electrode and LLI in percent, cell capacity, SOH and lithium inventory."""

    lam_p: float
    lam_n: float
    lli: float
    q_cell: float
    soh: float
    n_li: float
    timestamp: float = 0.0

    @property
    def flagged(self) -> bool:
        """Negative modes or an SOH outside (0, 1.2] point at estimation noise."""

        return min(self.lam_p, self.lam_n, self.lli) < 0 or not 0 < self.soh <= 1.2

    def as_row(self) -> dict[str, float]:
        return {
            "t_s": self.timestamp,
            "lam_p_pct": self.lam_p,
            "lam_n_pct": self.lam_n,
            "lli_pct": self.lli,
            "q_cell_ah": self.q_cell,
            "soh": self.soh,
            "n_li_mol": self.n_li,
        }

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def lam(q_aged: float, q_fresh: float) -> float:
    """
    Loss of active material ``(1 - q_aged/q_fresh) * 100``.

    :raises ValueError: If ``q_fresh`` is not positive.
    """

    if not q_fresh > 0:
        raise ValueError(f"Fresh capacity must be positive, got {q_fresh}")
    return (1.0 - q_aged / q_fresh) * 100.0


def lithium_inventory(esoh: EsohParams, soc: float = 0.0) -> float:
    """
    Cyclable lithium ``3600/F * (thp*Qp + thn*Qn)`` in mol, with both SOLs taken at ``soc``.

    Independent of ``soc`` whenever the useful capacities agree.

    :raises ConfigurationError: On degenerate windows.
    """

    if not (esoh.qp > 0 and esoh.qn > 0):
        raise ConfigurationError("Lithium inventory needs positive capacities")
    thp, thn = sol_from_soc(esoh, soc)
    return 3600.0 / FARADAY * (thp * esoh.qp + thn * esoh.qn)


def lli(n_aged: float, n_fresh: float) -> float:
    """Loss of lithium inventory in percent; negative values are returned as-is."""

    if not n_fresh > 0:
        raise ValueError(f"Fresh lithium inventory must be positive, got {n_fresh}")
    return (1.0 - n_aged / n_fresh) * 100.0


def cell_capacity(esoh: EsohParams) -> float:
    """Usable cell capacity, taken from the positive window (Ah)."""

    return useful_capacity(esoh, "positive")


def soh(esoh_aged: EsohParams, q_fresh: float) -> float:
    """Aged over fresh cell capacity."""

    if not q_fresh > 0:
        raise ValueError(f"Fresh capacity must be positive, got {q_fresh}")
    return cell_capacity(esoh_aged) / q_fresh


def assess(esoh: EsohParams, fresh: EsohParams, timestamp: float = 0.0) -> HealthReport:
    """
    Compare ``esoh`` against the fresh reference.

    :param esoh: Current (estimated or aged) parameters.
    :param fresh: Beginning-of-life parameters from the pack.
    :param timestamp: Data time of the report (s).
    """

    n_fresh = lithium_inventory(fresh)
    n_now = lithium_inventory(esoh)
    report = HealthReport(
        lam_p=lam(esoh.qp, fresh.qp),
        lam_n=lam(esoh.qn, fresh.qn),
        lli=lli(n_now, n_fresh),
        q_cell=cell_capacity(esoh),
        soh=soh(esoh, cell_capacity(fresh)),
        n_li=n_now,
        timestamp=timestamp,
    )
    if report.flagged:
        logger.warning(
            "Health report at t=%.0f s outside the expected range (LAM_p=%.2f, LAM_n=%.2f, LLI=%.2f, SOH=%.3f)",
            timestamp,
            report.lam_p,
            report.lam_n,
            report.lli,
            report.soh,
        )
    return report
