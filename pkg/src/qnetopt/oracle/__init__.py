"""Exact-enumeration oracles: value iteration, Kolmogorov forward equation, HJB residual."""

from qnetopt.oracle.hjb import hjb_bracket, hjb_residual, sample_points
from qnetopt.oracle.kolmogorov import Distribution, forward_kolmogorov
from qnetopt.oracle.statespace import (
    EventStencil,
    StateSpace,
    build_generator,
    distribution_mean,
    max_total_rate,
    point_mass,
)
from qnetopt.oracle.value_iteration import (
    ValueTable,
    argmin_state_independent,
    vi_finite_horizon,
    vi_infinite_horizon,
)

__all__ = [
    "Distribution",
    "EventStencil",
    "StateSpace",
    "ValueTable",
    "argmin_state_independent",
    "build_generator",
    "distribution_mean",
    "forward_kolmogorov",
    "hjb_bracket",
    "hjb_residual",
    "max_total_rate",
    "point_mass",
    "sample_points",
    "vi_finite_horizon",
    "vi_infinite_horizon",
]
