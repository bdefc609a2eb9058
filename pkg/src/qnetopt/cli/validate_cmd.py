"""Validate command: cross-check the costate solution against independent oracles."""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, Field, computed_field
from rich.table import Table

from qnetopt.artifacts import VALIDATION_FILE, VALUE_TABLE_FILE, write_csv, write_json
from qnetopt.cli.common import RunContext, console
from qnetopt.costate import CostateTrajectory, solve_costate_fh, solve_costate_ih, value_at
from qnetopt.errors import ConfigError
from qnetopt.meanode import expected_cost, integrate_mean
from qnetopt.oracle import (
    StateSpace,
    ValueTable,
    argmin_state_independent,
    forward_kolmogorov,
    hjb_residual,
    point_mass,
    sample_points,
    vi_finite_horizon,
    vi_infinite_horizon,
)
from qnetopt.policy import BangBangPolicy, extract_policy

logger = logging.getLogger(__name__)

MODES: tuple[str, ...] = ("vi", "mean-ode", "hjb", "all")

MEAN_ODE_REL_TOL = 1e-6
KOLMOGOROV_TOL = 1e-6
HJB_REL_TOL = 1e-6


class CheckResult(BaseModel):
    name: str
    passed: bool
    deviation: float
    tolerance: float


class ValidationReport(BaseModel):
    mode: str
    max_units: int
    checks: list[CheckResult] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, deviation: float, tolerance: float) -> None:
        self.checks.append(
            CheckResult(
                name=name,
                passed=bool(deviation <= tolerance),
                deviation=float(deviation),
                tolerance=tolerance,
            )
        )


def _relative_gap(values: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.abs(reference).max()) if reference.size else 0.0
    gap = float(np.abs(values - reference).max()) if reference.size else 0.0
    return gap / scale if scale > 0 else gap


def _max_units(ctx: RunContext) -> int:
    units = ctx.config.oracle.n_override
    return int(ctx.x0.sum()) if units is None else units


def _check_state_space(ctx: RunContext, max_units: int) -> None:
    size = StateSpace.expected_size(ctx.net.n, max_units)
    cap = ctx.config.oracle.max_states
    if size > cap:
        raise ConfigError(
            f"N={max_units} gives {size} states, above the cap of {cap}; "
            f"raise oracle.max_states to at least {size} or lower --oracle-n"
        )


def _write_value_table(ctx: RunContext, table: ValueTable) -> None:
    n, m_u = ctx.net.n, ctx.net.m_u
    header = [
        *(f"x_{i + 1}" for i in range(n)),
        "value",
        *(f"u_{k + 1}" for k in range(m_u)),
    ]
    controls = (
        table.controls[0] if table.controls is not None
        else np.zeros((table.space.size, m_u), dtype=bool)
    )
    rows = [
        [*x.tolist(), float(v), *(ctx.net.u_max if on else 0.0 for on in u)]
        for x, v, u in zip(table.space.states, table.values, controls, strict=True)
    ]
    write_csv(ctx.out_dir / VALUE_TABLE_FILE, header, rows)


def _check_vi(ctx: RunContext, report: ValidationReport, traj: CostateTrajectory) -> None:
    oracle = ctx.config.oracle
    tol = oracle.rel_tolerance
    fh = vi_finite_horizon(ctx.net, ctx.costs, report.max_units, steps=oracle.steps)
    states = fh.space.states.astype(float)
    report.add("vi_fh_value", _relative_gap(states @ traj.y0, fh.values), tol)
    _, fit_residual = fh.linear_fit()
    scale = float(np.abs(fh.values).max()) if fh.values.size else 0.0
    report.add("vi_fh_linearity", fit_residual / scale if scale > 0 else fit_residual, tol)
    report.add("vi_state_independent", float(len(argmin_state_independent(fh, ctx.net))), 0.0)
    _write_value_table(ctx, fh)

    ih = solve_costate_ih(ctx.net, ctx.costs, method=ctx.config.solver.ih_method)
    vi_ih = vi_infinite_horizon(ctx.net, ctx.costs, report.max_units, tol=oracle.tol)
    report.add("vi_ih_value", _relative_gap(states @ ih.y, vi_ih.values), tol)


def _check_mean_ode(
    ctx: RunContext, report: ValidationReport, traj: CostateTrajectory, policy: BangBangPolicy,
) -> None:
    dt = ctx.config.solver.dt
    predicted = value_at(traj, ctx.x0, 0.0)
    cost = expected_cost(ctx.net, policy, ctx.costs, ctx.x0, dt=dt)
    gap = abs(cost - predicted)
    report.add("mean_ode_cost", gap / abs(predicted) if predicted else gap, MEAN_ODE_REL_TOL)

    # the forward equation needs a start inside the enumerated space
    start = ctx.x0
    if int(start.sum()) > report.max_units:
        start = np.zeros(ctx.net.n, dtype=np.int64)
        start[int(np.argmax(ctx.x0))] = report.max_units
        logger.info("x0 exceeds N=%d; forward equation starts from %s", report.max_units, start)
    horizon = ctx.costs.horizon
    space = StateSpace.build(ctx.net.n, report.max_units)
    dist = forward_kolmogorov(
        ctx.net, space, policy, point_mass(space, start), horizon,
        dt=ctx.config.oracle.kolmogorov_dt,
    )
    mu = integrate_mean(ctx.net, policy, start, horizon, dt=dt).mu[-1]
    report.add("kolmogorov_mean", float(np.abs(dist.mean - mu).max()), KOLMOGOROV_TOL)


def _check_hjb(
    ctx: RunContext, report: ValidationReport, traj: CostateTrajectory, perturb_y: float,
) -> None:
    oracle = ctx.config.oracle
    if perturb_y:
        traj = traj.model_copy(update={"y": traj.y + perturb_y})
        logger.info("HJB check runs on y shifted by %g", perturb_y)
    rng = np.random.default_rng(ctx.seed)
    states, times = sample_points(
        ctx.net, ctx.costs.horizon, oracle.hjb_samples, oracle.hjb_max_units, rng
    )
    residual = hjb_residual(ctx.net, ctx.costs, traj, states, times)
    scale = max(1.0, max(float(ctx.costs.q @ x) for x in states))
    report.add("hjb_residual", residual, HJB_REL_TOL * scale)


def run_validate(ctx: RunContext, mode: str, perturb_y: float = 0.0) -> ValidationReport:
    if mode not in MODES:
        raise ConfigError(f"--mode must be one of {', '.join(MODES)}, got {mode!r}")
    max_units = _max_units(ctx)
    selected = {"vi", "mean-ode", "hjb"} if mode == "all" else {mode}
    if selected & {"vi", "mean-ode"}:
        _check_state_space(ctx, max_units)

    solver = ctx.config.solver
    traj = solve_costate_fh(ctx.net, ctx.costs, dt=solver.dt, switch_tol=solver.switch_tol)
    policy = extract_policy(traj, ctx.costs, ctx.net)
    report = ValidationReport(mode=mode, max_units=max_units)

    if "vi" in selected:
        _check_vi(ctx, report, traj)
    if "mean-ode" in selected:
        _check_mean_ode(ctx, report, traj, policy)
    if "hjb" in selected:
        _check_hjb(ctx, report, traj, perturb_y)

    write_json(ctx.out_dir / VALIDATION_FILE, report)
    _print_report(ctx, report)
    logger.info("Validation (%s): %s", mode, "passed" if report.passed else "FAILED")
    return report


def _print_report(ctx: RunContext, report: ValidationReport) -> None:
    if ctx.config.output.format == "json":
        console.print_json(report.model_dump_json())
        return
    table = Table(title=f"Validation ({report.mode}, N={report.max_units})")
    table.add_column("Check", style="cyan")
    table.add_column("Deviation", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Result")
    for check in report.checks:
        result = "[green]pass[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(check.name, f"{check.deviation:.3g}", f"{check.tolerance:.3g}", result)
    console.print(table)
    console.print("passed" if report.passed else "failed")
