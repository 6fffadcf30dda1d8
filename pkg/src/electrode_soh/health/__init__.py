"""Degradation-mode and state-of-health reporting."""

from .report import (
    REPORT_COLUMNS,
    HealthReport,
    assess,
    cell_capacity,
    lam,
    lithium_inventory,
    lli,
    soh,
)

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
