"""Pointwise HJB residual of a linear candidate value function V(x, t) = y(t).x."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any

import numpy as np

from qnetopt.costate.models import CostateTrajectory, CostSpec
from qnetopt.network.model import QueueNetwork, as_state, event_rates

logger = logging.getLogger(__name__)


def hjb_bracket(
    net: QueueNetwork,
    costs: CostSpec,
    y: np.ndarray,
    ydot: np.ndarray,
    x: Any,
) -> float:
    """min_u { q.x + v.(U H x) + sum_i W_i(x, u) (V(x + r_i) - V(x)) } + dV/dt at x."""
    state = as_state(net, x).astype(float)
    changes = net.transition_matrix
    deltas = changes.T @ y  # V(x + r_i) - V(x) for linear V
    exit_part = event_rates(net, state, np.zeros(net.m_u))[: net.m_e] @ deltas[: net.m_e]
    sources = state[net.route_sources]
    per_control = sources * (costs.v + deltas[net.m_e :])
    control_part = net.u_max * float(np.minimum(per_control, 0.0).sum())
    return float(costs.q @ state + exit_part + control_part + ydot @ state)


def hjb_residual(
    net: QueueNetwork,
    costs: CostSpec,
    traj: CostateTrajectory,
    sample_states: Sequence[Any],
    sample_times: Sequence[float],
) -> float:
    """Largest absolute HJB bracket over paired (state, time) samples."""
    costs.check_against(net)
    worst = 0.0
    for x, t in zip(sample_states, sample_times, strict=True):
        bracket = hjb_bracket(net, costs, traj.y_at(t), traj.ydot_at(t), x)
        worst = max(worst, abs(bracket))
    logger.debug("HJB residual over %d samples: %.3g", len(sample_times), worst)
    return worst


def sample_points(
    net: QueueNetwork,
    horizon: float,
    count: int,
    max_units: int,
    rng: np.random.Generator,
) -> tuple[list[np.ndarray], list[float]]:
    """Uniform random states with sum(x) <= max_units and times in [0, horizon]."""
    states: list[np.ndarray] = []
    while len(states) < count:
        x = rng.integers(0, max_units + 1, size=net.n)
        if x.sum() <= max_units:
            states.append(x)
    times = rng.uniform(0.0, horizon, size=count).tolist()
    return states, times
