"""Expected-state (first moment) dynamics and exact expected costs."""

from qnetopt.meanode.integrator import (
    MeanTrajectory,
    expected_cost,
    integrate_mean,
    mean_dynamics_matrix,
)

__all__ = [
    "MeanTrajectory",
    "expected_cost",
    "integrate_mean",
    "mean_dynamics_matrix",
]
