"""Emit-plot command: turn saved artifacts into plot-ready CSV files.

Files written to the output directory:

- ``policy.csv``: time, u_1..u_m on a uniform grid plus every switch time
- ``states.csv``: path, time, event, x_1..x_n from the simulated trajectories
- ``mean.csv``: time, mu_1..mu_n of the expected state under the policy
- ``value_grid.csv``: x_1..x_k, V with V = y(0).x on a grid over the first
  three queues (later queues held at 0); y(0) comes from ``costate_ih.json``
  for a stationary policy and from ``costate.json`` otherwise
"""

from __future__ import annotations

import logging
from itertools import product
from pathlib import Path

import numpy as np

from qnetopt.artifacts import (
    COSTATE_FILE,
    COSTATE_IH_FILE,
    read_csv,
    read_model,
    write_csv,
)
from qnetopt.cli.common import RunContext, console
from qnetopt.cli.simulate_cmd import load_policy
from qnetopt.costate import CostateTrajectory, IhSolution
from qnetopt.errors import ConfigError
from qnetopt.meanode import integrate_mean
from qnetopt.policy import BangBangPolicy

logger = logging.getLogger(__name__)

MAX_GRID_QUEUES = 3


def policy_rows(policy: BangBangPolicy, horizon: float, points: int) -> list[list[float]]:
    times = set(np.linspace(0.0, horizon, points).tolist())
    times.update(policy.breakpoints(0.0, horizon))
    return [[t, *policy.evaluate(t).tolist()] for t in sorted(times)]


def _costate_y0(out_dir: Path, policy: BangBangPolicy) -> np.ndarray:
    """y(0) from the costate artifact that belongs with the policy's horizon."""
    if policy.horizon is None:
        path = out_dir / COSTATE_IH_FILE
        if not path.exists():
            raise ConfigError(f"Missing artifact: {path} (run solve-ih for a stationary policy)")
        return np.asarray(read_model(path, IhSolution).y)
    path = out_dir / COSTATE_FILE
    if not path.exists():
        raise ConfigError(f"Missing artifact: {path} (run solve-fh for a finite-horizon policy)")
    return read_model(path, CostateTrajectory).y0


def value_grid_rows(y0: np.ndarray, grid_max: int) -> list[list[float]]:
    k = min(MAX_GRID_QUEUES, y0.shape[0])
    return [
        [*point, float(np.dot(y0[:k], point))]
        for point in product(range(grid_max + 1), repeat=k)
    ]


def _trajectory_rows(out_dir: Path) -> tuple[list[list[str]], int]:
    rows: list[list[str]] = []
    paths = sorted(
        out_dir.glob("trajectory_*.csv"), key=lambda p: int(p.stem.rsplit("_", 1)[1])
    )
    for i, path in enumerate(paths):
        _, body = read_csv(path)
        # a path that starts empty never moves
        if body and all(float(v) == 0.0 for v in body[0][2:]):
            continue
        rows.extend([str(i), *row] for row in body)
    return rows, len(paths)


def run_emit_plot(
    ctx: RunContext, policy_path: str | None, points: int = 201, grid_max: int = 10,
) -> list[Path]:
    out_dir = ctx.out_dir
    policy = load_policy(ctx, policy_path)
    horizon = policy.horizon if policy.horizon is not None else ctx.costs.horizon
    n, m_u = ctx.net.n, ctx.net.m_u
    written: list[Path] = []

    written.append(write_csv(
        out_dir / "policy.csv",
        ["time", *(f"u_{k + 1}" for k in range(m_u))],
        policy_rows(policy, horizon, points),
    ))

    state_rows, n_paths = _trajectory_rows(out_dir)
    written.append(write_csv(
        out_dir / "states.csv",
        ["path", "time", "event", *(f"x_{i + 1}" for i in range(n))],
        state_rows,
    ))
    logger.info("Collected %d trajectory file(s)", n_paths)

    mean = integrate_mean(ctx.net, policy, ctx.x0, horizon, dt=ctx.config.solver.dt)
    written.append(write_csv(
        out_dir / "mean.csv", ["time", *(f"mu_{i + 1}" for i in range(n))], mean.to_rows()
    ))

    y0 = _costate_y0(out_dir, policy)
    k = min(MAX_GRID_QUEUES, n)
    written.append(write_csv(
        out_dir / "value_grid.csv",
        [*(f"x_{i + 1}" for i in range(k)), "V"],
        value_grid_rows(y0, grid_max),
    ))

    for path in written:
        console.print(f"wrote {path}")
    return written
