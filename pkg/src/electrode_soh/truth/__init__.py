"""Synthetic ground truth: degradation, current profiles and trajectory simulation."""

from .degradation import DegradationSpec, apply_degradation, degradation_residuals
from .profiles import CurrentProfile, ProfileSpec, SegmentSpec, generate_profile
from .simulator import (
    MEASUREMENT_COLUMNS,
    TRUTH_COLUMNS,
    Scenario,
    Trajectory,
    TruthCell,
    build_truth,
    load_scenario,
    perturb_pack,
    simulate_trajectory,
)

__all__ = [
    "DegradationSpec",
    "apply_degradation",
    "degradation_residuals",
    "CurrentProfile",
    "ProfileSpec",
    "SegmentSpec",
    "generate_profile",
    "MEASUREMENT_COLUMNS",
    "TRUTH_COLUMNS",
    "Scenario",
    "Trajectory",
    "TruthCell",
    "build_truth",
    "load_scenario",
    "perturb_pack",
    "simulate_trajectory",
]
