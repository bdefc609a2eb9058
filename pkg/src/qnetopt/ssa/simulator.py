"""Exact stochastic simulation of the routed queue network.

Within each interval between policy switch times the controls are constant,
so the process is a time-homogeneous jump chain there and the direct
Gillespie method is exact. A waiting time that would cross the next switch
is discarded and redrawn from the switch time with refreshed rates, which
is valid by memorylessness.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from qnetopt.costate.models import CostSpec
from qnetopt.models import FloatArray, IntArray
from qnetopt.network.model import QueueNetwork, as_state
from qnetopt.policy.bangbang import BangBangPolicy

logger = logging.getLogger(__name__)

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


class SsaTrajectory(BaseModel):
    """One sample path: jump times, event indices and post-jump states."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    x0: IntArray
    t_end: float
    route_sources: IntArray
    times: FloatArray
    event_indices: IntArray
    states: IntArray
    accumulated_cost: float | None = None

    @property
    def n_events(self) -> int:
        return int(self.times.shape[0])

    @property
    def events(self) -> Iterator[tuple[float, int, np.ndarray]]:
        for t, k, x in zip(self.times, self.event_indices, self.states, strict=True):
            yield float(t), int(k), x

    def state_at(self, t: float) -> np.ndarray:
        """Right-continuous state lookup: an event at time t is already applied."""
        idx = int(np.searchsorted(self.times, t, side="right"))
        return np.asarray(self.x0 if idx == 0 else self.states[idx - 1])

    def to_rows(self) -> list[list[Any]]:
        """CSV rows (time, event, x_1..x_n); the initial row has event -1."""
        rows: list[list[Any]] = [[0.0, -1, *self.x0.tolist()]]
        rows.extend([t, k, *x.tolist()] for t, k, x in self.events)
        return rows


def _check_policy(net: QueueNetwork, policy: BangBangPolicy) -> None:
    if policy.m_u != net.m_u:
        raise ValueError(f"policy has {policy.m_u} controls, network has {net.m_u} routes")
    if policy.u_max != net.u_max:
        raise ValueError(f"policy u_max {policy.u_max} differs from network u_max {net.u_max}")


def simulate(
    net: QueueNetwork,
    policy: BangBangPolicy,
    x0: Any,
    t_end: float,
    seed: SeedLike = None,
) -> SsaTrajectory:
    """Sample one path on [0, t_end] under an open-loop bang-bang policy."""
    _check_policy(net, policy)
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if policy.horizon is not None and t_end > policy.horizon:
        raise ValueError(f"t_end={t_end} exceeds the policy horizon {policy.horizon}")

    start = as_state(net, x0)
    state = start.copy()
    rng = np.random.default_rng(seed)
    changes = net.transition_matrix
    event_queue = np.concatenate([net.exit_queues, net.route_sources])
    n_events = event_queue.shape[0]

    times: list[float] = []
    event_indices: list[int] = []
    states: list[np.ndarray] = []

    t = 0.0
    for seg_end in [*policy.breakpoints(0.0, t_end), t_end]:
        if not state.any():
            break
        multipliers = np.concatenate([net.gammas, policy.evaluate(t)])
        while True:
            rates = multipliers * state[event_queue]
            total = float(rates.sum())
            if total <= 0.0:
                break
            wait = rng.exponential(1.0 / total)
            if t + wait > seg_end:
                break
            t += wait
            k = int(np.searchsorted(np.cumsum(rates), rng.random() * total, side="right"))
            k = min(k, n_events - 1)
            state = state + changes[:, k]
            times.append(t)
            event_indices.append(k)
            states.append(state)
        t = seg_end

    return SsaTrajectory(
        x0=start,
        t_end=t_end,
        route_sources=net.route_sources,
        times=np.array(times, dtype=float),
        event_indices=np.array(event_indices, dtype=np.int64),
        states=np.array(states, dtype=np.int64).reshape(len(states), net.n),
    )


def accumulate_cost(
    traj: SsaTrajectory, costs: CostSpec, policy: BangBangPolicy, horizon: float,
) -> float:
    """Exact running plus terminal cost of one path.

    Events and policy switches cut [0, T] into pieces on which both the state
    and the controls are constant, so each piece contributes
    (q.x + v.(u * x_source)) * length in closed form.
    """
    tol = 1e-12 * max(1.0, horizon)
    if abs(traj.t_end - horizon) > tol:
        raise ValueError(f"trajectory ends at {traj.t_end}, cost horizon is {horizon}")
    if policy.horizon is not None and abs(policy.horizon - horizon) > tol:
        raise ValueError(f"policy horizon {policy.horizon} differs from cost horizon {horizon}")

    cuts = sorted({0.0, horizon, *traj.times.tolist(), *policy.breakpoints(0.0, horizon)})
    pieces: list[float] = []
    for a, b in zip(cuts, cuts[1:], strict=False):
        rate = stage_cost_rate(traj.state_at(a), policy.evaluate(a), costs, traj.route_sources)
        pieces.append(rate * (b - a))

    cost = math.fsum(pieces) + float(costs.c @ traj.state_at(horizon))
    traj.accumulated_cost = cost
    return cost


def stage_cost_rate(
    x: np.ndarray, u: np.ndarray, costs: CostSpec, route_sources: np.ndarray,
) -> float:
    """g(x, U) = q.x + v.(U H x)."""
    return float(costs.q @ x + costs.v @ (u * x[route_sources]))
