"""First-moment oracle for open-loop policies.

Every event rate is linear in x, so taking expectations in the master
equation gives a closed linear system for mu(t) = E[x(t)]:

    d mu/dt = A(u) mu,   A(u) = R_E Gamma E + R_D diag(u) H

and, because the stage cost is linear in x and U(t) is deterministic, the
expected cost of the policy is exactly

    int_0^T (q + H^T (u(t) * v)) . mu(t) dt + c . mu(T).

This is independent of the costate machinery, which makes it a useful
cross-check of y(0).x0.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from functools import partial
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import simpson

from qnetopt.costate.models import CostSpec
from qnetopt.models import FloatArray
from qnetopt.network.model import QueueNetwork, as_state, check_controls
from qnetopt.numerics import rk4_segment
from qnetopt.policy.bangbang import BangBangPolicy

logger = logging.getLogger(__name__)

DEFAULT_DT_FRACTION = 1e-3


class MeanTrajectory(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: FloatArray
    mu: FloatArray

    def at(self, t: float) -> np.ndarray:
        if not self.grid[0] <= t <= self.grid[-1]:
            raise ValueError(f"t={t} outside [{self.grid[0]}, {self.grid[-1]}]")
        return np.array([np.interp(t, self.grid, self.mu[:, i]) for i in range(self.mu.shape[1])])

    def to_rows(self) -> list[list[float]]:
        return [[float(t), *row.tolist()] for t, row in zip(self.grid, self.mu, strict=True)]


def mean_dynamics_matrix(net: QueueNetwork, u: Any) -> np.ndarray:
    """A(u) = R_E Gamma E + R_D U H."""
    controls = check_controls(net, u)
    return net.exit_operator + net.route_matrix @ np.diag(controls) @ net.source_map


def _segments(
    net: QueueNetwork, policy: BangBangPolicy, x0: Any, horizon: float, dt: float | None,
) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield (u, times, mu) per inter-switch segment; each has an even number of steps."""
    if policy.m_u != net.m_u:
        raise ValueError(f"policy has {policy.m_u} controls, network has {net.m_u} routes")
    if policy.horizon is not None and horizon > policy.horizon:
        raise ValueError(f"T={horizon} exceeds the policy horizon {policy.horizon}")
    dt = DEFAULT_DT_FRACTION * horizon if dt is None else dt
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    mu = as_state(net, x0).astype(float)
    cuts = [0.0, *policy.breakpoints(0.0, horizon), horizon]
    for a, b in zip(cuts, cuts[1:], strict=False):
        u = policy.evaluate(a)
        a_mat = mean_dynamics_matrix(net, u)
        times, mus = rk4_segment(partial(np.matmul, a_mat), mu, a, b, dt, even=True)
        mu = mus[-1]
        yield u, times, mus


def integrate_mean(
    net: QueueNetwork, policy: BangBangPolicy, x0: Any, horizon: float, dt: float | None = None,
) -> MeanTrajectory:
    """RK4 on d mu/dt = A(u(t)) mu, restarted exactly at every policy switch."""
    grids: list[np.ndarray] = []
    mus: list[np.ndarray] = []
    for i, (_, times, seg) in enumerate(_segments(net, policy, x0, horizon, dt)):
        grids.append(times if i == 0 else times[1:])
        mus.append(seg if i == 0 else seg[1:])
    traj = MeanTrajectory(grid=np.concatenate(grids), mu=np.vstack(mus))
    logger.debug("Mean trajectory: %d grid points", traj.grid.shape[0])
    return traj


def expected_cost(
    net: QueueNetwork,
    policy: BangBangPolicy,
    costs: CostSpec,
    x0: Any,
    horizon: float | None = None,
    dt: float | None = None,
) -> float:
    """Exact expected cost of an open-loop policy (Simpson per segment)."""
    costs.check_against(net)
    horizon = costs.horizon if horizon is None else horizon
    pieces: list[float] = []
    mu_end = as_state(net, x0).astype(float)
    for u, times, mus in _segments(net, policy, x0, horizon, dt):
        weights = costs.q + net.source_map.T @ (u * costs.v)
        pieces.append(float(simpson(mus @ weights, x=times)))
        mu_end = mus[-1]
    return math.fsum(pieces) + float(costs.c @ mu_end)
