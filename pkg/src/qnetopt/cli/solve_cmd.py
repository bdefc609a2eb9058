"""Solve commands: finite-horizon and infinite-horizon costate plus policy."""

from __future__ import annotations

import json
import logging

from qnetopt.artifacts import COSTATE_FILE, COSTATE_IH_FILE, POLICY_FILE, write_json
from qnetopt.cli.common import RunContext, console
from qnetopt.costate import solve_costate_fh, solve_costate_ih, value_at
from qnetopt.policy import extract_policy

logger = logging.getLogger(__name__)

POLICY_IH_FILE = "policy_ih.json"


def run_solve_fh(ctx: RunContext) -> float:
    solver = ctx.config.solver
    traj = solve_costate_fh(ctx.net, ctx.costs, dt=solver.dt, switch_tol=solver.switch_tol)
    policy = extract_policy(traj, ctx.costs, ctx.net)
    write_json(ctx.out_dir / COSTATE_FILE, traj)
    write_json(ctx.out_dir / POLICY_FILE, policy)
    value = value_at(traj, ctx.x0, 0.0)

    if ctx.config.output.format == "json":
        console.print_json(json.dumps({
            "value": value,
            "y0": traj.y0.tolist(),
            "switch_times": traj.switch_times,
            "active_at_start": traj.active_at_start,
        }))
    else:
        console.print(f"value= {value!r}")
        for k, (on, times) in enumerate(
            zip(traj.active_at_start, traj.switch_times, strict=True)
        ):
            state = "on" if on else "off"
            console.print(f"  u_{k + 1}: starts {state}, switches at {times}")
    return value


def run_solve_ih(ctx: RunContext) -> float:
    solution = solve_costate_ih(ctx.net, ctx.costs, method=ctx.config.solver.ih_method)
    policy = extract_policy(solution, ctx.costs, ctx.net)
    write_json(ctx.out_dir / COSTATE_IH_FILE, solution)
    write_json(ctx.out_dir / POLICY_IH_FILE, policy)
    value = value_at(solution, ctx.x0)
    # controls are reported 1-based, matching u_1..u_m in the CSV outputs
    active = [k + 1 for k in solution.active_set]

    if ctx.config.output.format == "json":
        console.print_json(json.dumps({
            "value": value,
            "y": solution.y.tolist(),
            "active_set": active,
            "degenerate": solution.degenerate,
        }))
    else:
        console.print(f"value= {value!r}")
        console.print(f"active_set= {active}")
        console.print(f"y= {solution.y.tolist()}")
        if solution.degenerate:
            console.print("[yellow]more than one active set is consistent[/yellow]")
    return value
