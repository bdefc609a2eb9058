"""Stochastic simulation and Monte-Carlo cost estimation."""

from qnetopt.ssa.estimator import (
    CostEstimate,
    MeanPathSample,
    estimate_cost,
    sample_mean_path,
    trial_seed,
)
from qnetopt.ssa.simulator import SsaTrajectory, accumulate_cost, simulate, stage_cost_rate

__all__ = [
    "CostEstimate",
    "MeanPathSample",
    "SsaTrajectory",
    "accumulate_cost",
    "estimate_cost",
    "sample_mean_path",
    "simulate",
    "stage_cost_rate",
    "trial_seed",
]
