"""Monte-Carlo cost estimation with per-trial seeding.

Trial i always draws from ``SeedSequence(master_seed, spawn_key=(i,))``, so
any trial can be reproduced on its own and the estimate does not depend on
how trials are distributed over workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from qnetopt.costate.models import CostSpec
from qnetopt.models import FloatArray
from qnetopt.network.model import QueueNetwork, as_state
from qnetopt.numerics import mean_and_std_error
from qnetopt.policy.bangbang import BangBangPolicy
from qnetopt.ssa.simulator import accumulate_cost, simulate

logger = logging.getLogger(__name__)

Z95 = 1.96


class CostEstimate(BaseModel):
    mean: float
    std_error: float
    trials: int
    ci95_low: float
    ci95_high: float

    @classmethod
    def from_samples(cls, samples: list[float]) -> CostEstimate:
        mean, std_error = mean_and_std_error(samples)
        return cls(
            mean=mean,
            std_error=std_error,
            trials=len(samples),
            ci95_low=mean - Z95 * std_error,
            ci95_high=mean + Z95 * std_error,
        )


class MeanPathSample(BaseModel):
    """Empirical mean state at checkpoints, with standard errors."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    checkpoints: FloatArray
    mean: FloatArray
    std_error: FloatArray
    trials: int


def trial_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def _trial_cost(args: tuple[QueueNetwork, BangBangPolicy, CostSpec, Any, int, int]) -> float:
    net, policy, costs, x0, master_seed, index = args
    horizon = costs.horizon
    traj = simulate(net, policy, x0, horizon, seed=trial_seed(master_seed, index))
    return accumulate_cost(traj, costs, policy, horizon)


def estimate_cost(
    net: QueueNetwork,
    policy: BangBangPolicy,
    costs: CostSpec,
    x0: Any,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> CostEstimate:
    """Sample mean of the path cost over ``trials`` independent paths."""
    if trials < 2:
        raise ValueError(f"at least two trials are required, got {trials}")
    costs.check_against(net)
    start = as_state(net, x0)
    jobs = [(net, policy, costs, start, master_seed, i) for i in range(trials)]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_trial_cost, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        samples = [_trial_cost(job) for job in jobs]

    estimate = CostEstimate.from_samples(samples)
    logger.info(
        "Cost estimate over %d trials: %.6g +/- %.3g", trials, estimate.mean, estimate.std_error
    )
    return estimate


def sample_mean_path(
    net: QueueNetwork,
    policy: BangBangPolicy,
    x0: Any,
    checkpoints: list[float],
    trials: int,
    master_seed: int,
) -> MeanPathSample:
    """Empirical E[x(t)] at the checkpoints from ``trials`` simulated paths."""
    if trials < 2:
        raise ValueError(f"at least two trials are required, got {trials}")
    times = sorted(checkpoints)
    t_end = times[-1]
    samples = np.empty((trials, len(times), net.n))
    for i in range(trials):
        traj = simulate(net, policy, x0, t_end, seed=trial_seed(master_seed, i))
        samples[i] = [traj.state_at(t) for t in times]
    return MeanPathSample(
        checkpoints=np.array(times),
        mean=samples.mean(axis=0),
        std_error=samples.std(axis=0, ddof=1) / math.sqrt(trials),
        trials=trials,
    )
