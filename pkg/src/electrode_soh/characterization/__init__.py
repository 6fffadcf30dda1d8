"""Half-cell passive-element characterization from HPPC data."""

from .costs import cost_j1, cost_j2, scalarized_cost
from .dataset import HPPC_COLUMNS, HppcDataset, PulseBlock, load_hppc_csv, segment_hppc
from .fitter import FitResult, canonical_order, fit_half_cell, reference_elements, synthesize_hppc
from .schedule import hppc_schedule, schedule_targets

__all__ = [
    "cost_j1",
    "cost_j2",
    "scalarized_cost",
    "HPPC_COLUMNS",
    "HppcDataset",
    "PulseBlock",
    "load_hppc_csv",
    "segment_hppc",
    "FitResult",
    "canonical_order",
    "fit_half_cell",
    "reference_elements",
    "synthesize_hppc",
    "hppc_schedule",
    "schedule_targets",
]
