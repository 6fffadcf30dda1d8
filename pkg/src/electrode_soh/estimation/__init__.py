"""Electrode state and capacity estimation."""

from .awtls import (
    AwtlsAccumulator,
    CapacityEstimate,
    HarvestedPair,
    PairHarvester,
    estimate_capacity,
    harvest_pairs,
    merit,
    push_pair,
)
from .estimator import (
    ESTIMATE_COLUMNS,
    PAIR_COLUMNS,
    WINDOW_COLUMNS,
    ElectrodeSohEstimator,
    EstimateRow,
    EstimatorEvents,
    RunScore,
    discharge_equivalent_end,
    score_run,
)
from .spkf import (
    STATE_DIM,
    FilterState,
    NoiseConfig,
    discrete_matrices,
    gain_and_update,
    jittered_cholesky,
    output_prediction,
    predict_covariance,
    predict_state,
    sigma_points,
    symmetrize,
    weights,
)

__all__ = [
    "AwtlsAccumulator",
    "CapacityEstimate",
    "HarvestedPair",
    "PairHarvester",
    "estimate_capacity",
    "harvest_pairs",
    "merit",
    "push_pair",
    "ESTIMATE_COLUMNS",
    "PAIR_COLUMNS",
    "WINDOW_COLUMNS",
    "ElectrodeSohEstimator",
    "EstimateRow",
    "EstimatorEvents",
    "RunScore",
    "discharge_equivalent_end",
    "score_run",
    "STATE_DIM",
    "FilterState",
    "NoiseConfig",
    "discrete_matrices",
    "gain_and_update",
    "jittered_cholesky",
    "output_prediction",
    "predict_covariance",
    "predict_state",
    "sigma_points",
    "symmetrize",
    "weights",
]
