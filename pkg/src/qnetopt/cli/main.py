"""qnetopt CLI entry point."""

from __future__ import annotations

import typer

from qnetopt import __version__
from qnetopt.cli.common import (
    EXIT_CHECK_FAILED,
    cli_errors,
    configure_logging,
    console,
    load_context,
)

app = typer.Typer(
    name="qnetopt",
    help="Optimal bang-bang routing for networks of M/M/inf queues",
    no_args_is_help=True,
)

NETWORK_HELP = "Network description file (JSON or YAML)"
CONFIG_HELP = "Run config file with costs and options (YAML or JSON)"
X0_HELP = "Initial state as comma-separated counts, e.g. 50,0"
OUT_DIR_HELP = "Directory for artifacts"
FORMAT_HELP = "Stdout format: text or json"


@app.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
) -> None:
    configure_logging(verbose)


@app.command()
def version() -> None:
    """Show version."""
    console.print(f"qnetopt v{__version__}")


@app.command("solve-fh")
def solve_fh(
    network: str | None = typer.Option(None, "--network", "-n", help=NETWORK_HELP),
    costs: str | None = typer.Option(None, "--costs", "--config", "-c", help=CONFIG_HELP),
    x0: str | None = typer.Option(None, "--x0", help=X0_HELP),
    dt: float | None = typer.Option(None, "--dt", help="RK4 step (default 1e-3 * T)"),
    out_dir: str | None = typer.Option(None, "--out-dir", "-o", help=OUT_DIR_HELP),
    output_format: str | None = typer.Option(None, "--format", help=FORMAT_HELP),
) -> None:
    """Solve the finite-horizon costate; write costate.json and policy.json."""
    from qnetopt.cli.solve_cmd import run_solve_fh

    with cli_errors():
        ctx = load_context(
            network, costs, x0=x0, dt=dt, out_dir=out_dir, output_format=output_format
        )
        run_solve_fh(ctx)


@app.command("solve-ih")
def solve_ih(
    network: str | None = typer.Option(None, "--network", "-n", help=NETWORK_HELP),
    costs: str | None = typer.Option(None, "--costs", "--config", "-c", help=CONFIG_HELP),
    x0: str | None = typer.Option(None, "--x0", help=X0_HELP),
    out_dir: str | None = typer.Option(None, "--out-dir", "-o", help=OUT_DIR_HELP),
    output_format: str | None = typer.Option(None, "--format", help=FORMAT_HELP),
) -> None:
    """Solve the infinite-horizon costate; write costate_ih.json and policy_ih.json."""
    from qnetopt.cli.solve_cmd import run_solve_ih

    with cli_errors():
        ctx = load_context(network, costs, x0=x0, out_dir=out_dir, output_format=output_format)
        run_solve_ih(ctx)


@app.command()
def simulate(
    network: str | None = typer.Option(None, "--network", "-n", help=NETWORK_HELP),
    costs: str | None = typer.Option(None, "--costs", "--config", "-c", help=CONFIG_HELP),
    policy: str | None = typer.Option(
        None, "--policy", "-p", help="Policy JSON (default <out-dir>/policy.json)"
    ),
    x0: str | None = typer.Option(None, "--x0", help=X0_HELP),
    trials: int | None = typer.Option(None, "--trials", "-t", help="Monte-Carlo trials"),
    seed: int | None = typer.Option(
        None, "--seed", "-s", help="Master seed (default $QNETOPT_SEED, else 0)"
    ),
    out_dir: str | None = typer.Option(None, "--out-dir", "-o", help=OUT_DIR_HELP),
    output_format: str | None = typer.Option(None, "--format", help=FORMAT_HELP),
) -> None:
    """Simulate paths under a policy; write trajectory_<i>.csv and estimate.json."""
    from qnetopt.cli.simulate_cmd import run_simulate

    with cli_errors():
        ctx = load_context(
            network, costs, x0=x0, trials=trials, seed=seed, out_dir=out_dir,
            output_format=output_format,
        )
        run_simulate(ctx, policy)


@app.command()
def validate(
    network: str | None = typer.Option(None, "--network", "-n", help=NETWORK_HELP),
    costs: str | None = typer.Option(None, "--costs", "--config", "-c", help=CONFIG_HELP),
    x0: str | None = typer.Option(None, "--x0", help=X0_HELP),
    mode: str = typer.Option("all", "--mode", "-m", help="vi, mean-ode, hjb or all"),
    oracle_n: int | None = typer.Option(
        None, "--oracle-n", "-N", help="Unit count N of the enumerated state space"
    ),
    dt: float | None = typer.Option(None, "--dt", help="RK4 step (default 1e-3 * T)"),
    seed: int | None = typer.Option(None, "--seed", "-s", help="Seed for HJB sample points"),
    perturb_y: float = typer.Option(
        0.0, "--perturb-y", help="Shift y by this constant before the HJB check"
    ),
    out_dir: str | None = typer.Option(None, "--out-dir", "-o", help=OUT_DIR_HELP),
    output_format: str | None = typer.Option(None, "--format", help=FORMAT_HELP),
) -> None:
    """Cross-check the solution against value iteration, the mean ODE and the HJB equation.

    Writes validation.json (and value_table.csv for the vi checks); exits 1
    if any check fails.
    """
    from qnetopt.cli.validate_cmd import run_validate

    with cli_errors():
        ctx = load_context(
            network, costs, x0=x0, dt=dt, seed=seed, oracle_n=oracle_n, out_dir=out_dir,
            output_format=output_format,
        )
        report = run_validate(ctx, mode, perturb_y=perturb_y)
    if not report.passed:
        raise typer.Exit(EXIT_CHECK_FAILED)


@app.command("emit-plot")
def emit_plot(
    network: str | None = typer.Option(None, "--network", "-n", help=NETWORK_HELP),
    costs: str | None = typer.Option(None, "--costs", "--config", "-c", help=CONFIG_HELP),
    policy: str | None = typer.Option(
        None, "--policy", "-p", help="Policy JSON (default <out-dir>/policy.json)"
    ),
    x0: str | None = typer.Option(None, "--x0", help=X0_HELP),
    points: int = typer.Option(201, "--points", help="Uniform time points in policy.csv"),
    grid_max: int = typer.Option(10, "--grid-max", help="Largest count per queue in value_grid"),
    out_dir: str | None = typer.Option(None, "--out-dir", "-o", help=OUT_DIR_HELP),
) -> None:
    """Write policy.csv, states.csv, mean.csv and value_grid.csv from saved artifacts.

    policy.csv: time, u_1..u_m (each 0 or u_max). states.csv: path, time,
    event, x_1..x_n from trajectory_<i>.csv. mean.csv: time, mu_1..mu_n.
    value_grid.csv: x_1..x_k, V = y(0).x over the first three queues.
    """
    from qnetopt.cli.plot_cmd import run_emit_plot

    with cli_errors():
        ctx = load_context(network, costs, x0=x0, out_dir=out_dir)
        run_emit_plot(ctx, policy, points=points, grid_max=grid_max)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
