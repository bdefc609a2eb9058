"""Forward Kolmogorov equation dp/dt = Q(u(t))^T p for an open-loop policy."""

from __future__ import annotations

import logging
from functools import partial
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from qnetopt.errors import SolverError
from qnetopt.models import FloatArray
from qnetopt.network.model import QueueNetwork
from qnetopt.numerics import rk4_step, uniform_substeps
from qnetopt.oracle.statespace import (
    EventStencil,
    StateSpace,
    build_generator,
    distribution_mean,
    max_total_rate,
)
from qnetopt.policy.bangbang import BangBangPolicy

logger = logging.getLogger(__name__)

MASS_TOL = 1e-6


class Distribution(BaseModel):
    """Probability vector over ``space`` at time ``t``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: StateSpace
    t: float
    p: FloatArray

    @property
    def mean(self) -> np.ndarray:
        return distribution_mean(self.space, self.p)


def _check_distribution(space: StateSpace, p0: Any) -> np.ndarray:
    p = np.asarray(p0, dtype=float)
    if p.shape != (space.size,):
        raise ValueError(f"p0 needs {space.size} entries, got shape {p.shape}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("p0 must be non-negative and sum to 1")
    return p


def forward_kolmogorov(
    net: QueueNetwork,
    space: StateSpace,
    policy: BangBangPolicy,
    p0: Any,
    horizon: float,
    dt: float | None = None,
) -> Distribution:
    """Propagate p0 to time ``horizon`` with RK4, restarting at each policy switch.

    The default step is 0.1 / (largest total event rate), well inside the
    RK4 stability region of the generator.
    """
    if policy.m_u != net.m_u:
        raise ValueError(f"policy has {policy.m_u} controls, network has {net.m_u} routes")
    if horizon < 0 or (policy.horizon is not None and horizon > policy.horizon):
        raise ValueError(f"T={horizon} outside the policy horizon [0, {policy.horizon}]")
    p = _check_distribution(space, p0)
    if dt is None:
        dt = 0.1 / max(max_total_rate(net, space.max_units), 1e-12)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    stencil = EventStencil.build(net, space)
    cuts = [0.0, *policy.breakpoints(0.0, horizon), horizon]
    for a, b in zip(cuts, cuts[1:], strict=False):
        if b <= a:
            continue
        q_t = build_generator(net, space, policy.evaluate(a), stencil).T.tocsr()
        rhs = partial(_apply, q_t)
        steps = uniform_substeps(b - a, dt)
        h = (b - a) / steps
        for _ in range(steps):
            p = rk4_step(rhs, p, h)
        if not np.all(np.isfinite(p)):
            raise SolverError(f"non-finite probabilities by t={b:.6g}; reduce dt")
        drift = abs(float(p.sum()) - 1.0)
        if drift > MASS_TOL:
            raise SolverError(f"probability mass drifted by {drift:.3g} by t={b:.6g}; reduce dt")
        # RK4 keeps the total exactly, so an unstable step shows up as negative mass
        if float(p.min()) < -MASS_TOL:
            raise SolverError(
                f"negative probability {float(p.min()):.3g} by t={b:.6g}; reduce dt"
            )

    clipped = -float(p[p < 0].sum())
    if clipped > 1e-12:
        logger.warning("Clipped %.3g of negative probability mass", clipped)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    logger.debug("Kolmogorov solve: %d states up to T=%.6g", space.size, horizon)
    return Distribution(space=space, t=horizon, p=p)


def _apply(matrix: Any, p: np.ndarray) -> np.ndarray:
    return np.asarray(matrix @ p)
