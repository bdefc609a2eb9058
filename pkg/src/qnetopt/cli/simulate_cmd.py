"""Simulate command: sample paths under a saved policy and estimate its cost."""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path

from qnetopt.artifacts import ESTIMATE_FILE, POLICY_FILE, read_model, write_csv, write_json
from qnetopt.cli.common import RunContext, console
from qnetopt.errors import ConfigError
from qnetopt.policy import BangBangPolicy
from qnetopt.ssa import CostEstimate, estimate_cost, simulate, trial_seed

logger = logging.getLogger(__name__)


def trajectory_file(index: int) -> str:
    return f"trajectory_{index}.csv"


def load_policy(ctx: RunContext, policy_path: str | None) -> BangBangPolicy:
    path = Path(policy_path) if policy_path else ctx.out_dir / POLICY_FILE
    policy = read_model(path, BangBangPolicy)
    if policy.horizon is not None and not math.isclose(
        policy.horizon, ctx.costs.horizon, rel_tol=1e-12
    ):
        raise ConfigError(
            f"policy horizon {policy.horizon} does not match the configured T={ctx.costs.horizon}"
        )
    return policy


def run_simulate(ctx: RunContext, policy_path: str | None) -> CostEstimate | None:
    policy = load_policy(ctx, policy_path)
    sim = ctx.config.simulation
    horizon = ctx.costs.horizon
    header = ["time", "event", *(f"x_{i + 1}" for i in range(ctx.net.n))]

    for i in range(sim.trajectories):
        traj = simulate(ctx.net, policy, ctx.x0, horizon, seed=trial_seed(ctx.seed, i))
        write_csv(ctx.out_dir / trajectory_file(i), header, traj.to_rows())
    if sim.trajectories:
        logger.info("Wrote %d trajectory files to %s", sim.trajectories, ctx.out_dir)

    if sim.trials < 2:
        logger.warning("trials=%d is too few for a cost estimate; only paths written", sim.trials)
        console.print(f"wrote {sim.trajectories} trajectory file(s) to {ctx.out_dir}")
        return None

    estimate = estimate_cost(
        ctx.net, policy, ctx.costs, ctx.x0, sim.trials, ctx.seed, workers=sim.workers
    )
    write_json(ctx.out_dir / ESTIMATE_FILE, estimate)
    if ctx.config.output.format == "json":
        console.print_json(json.dumps(estimate.model_dump()))
    else:
        console.print(
            f"mean= {estimate.mean!r} std_error= {estimate.std_error!r} "
            f"trials= {estimate.trials}"
        )
    return estimate
