"""Shared plumbing for the qnetopt commands: context loading, logging, exit codes."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer
from pydantic import BaseModel, ConfigDict
from rich.console import Console
from rich.logging import RichHandler

from qnetopt.config import EnvSettings, RunConfig, load_config
from qnetopt.costate.models import CostSpec
from qnetopt.errors import ConfigError, SolverError
from qnetopt.models import IntArray
from qnetopt.network import QueueNetwork, as_state, load_network

logger = logging.getLogger(__name__)
console = Console()
err_console = Console(stderr=True)

EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@contextmanager
def cli_errors() -> Iterator[None]:
    """Turn library exceptions into the documented exit codes."""
    try:
        yield
    except SolverError as exc:
        err_console.print(f"[red]Solver error:[/red] {exc}")
        raise typer.Exit(EXIT_SOLVER) from exc
    except (ValueError, FileNotFoundError) as exc:
        # NetworkError, ConfigError and pydantic's ValidationError are ValueErrors
        err_console.print(f"[red]Configuration error:[/red] {exc}")
        raise typer.Exit(EXIT_CONFIG) from exc


def parse_x0(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError as exc:
        raise ConfigError(f"--x0 must be comma-separated integers, got {text!r}") from exc


class RunContext(BaseModel):
    """Everything a command needs after flags and config files are merged."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    config: RunConfig
    net: QueueNetwork
    costs: CostSpec
    x0: IntArray
    seed: int
    out_dir: Path


def load_context(
    network: str | None,
    config_path: str | None,
    *,
    x0: str | None = None,
    dt: float | None = None,
    trials: int | None = None,
    seed: int | None = None,
    oracle_n: int | None = None,
    out_dir: str | None = None,
    output_format: str | None = None,
) -> RunContext:
    """Merge flags over the run config over model defaults and build the network."""
    config = load_config(config_path)
    updates: dict[str, BaseModel] = {}
    if dt is not None:
        updates["solver"] = config.solver.model_copy(update={"dt": dt})
    sim_update: dict[str, object] = {}
    if trials is not None:
        sim_update["trials"] = trials
    if seed is not None:
        sim_update["seed"] = seed
    parsed_x0 = parse_x0(x0)
    if parsed_x0 is not None:
        sim_update["x0"] = parsed_x0
    if sim_update:
        updates["simulation"] = config.simulation.model_copy(update=sim_update)
    if oracle_n is not None:
        updates["oracle"] = config.oracle.model_copy(update={"n_override": oracle_n})
    out_update: dict[str, object] = {}
    if out_dir is not None:
        out_update["out_dir"] = out_dir
    if output_format is not None:
        if output_format not in ("text", "json"):
            raise ConfigError(f"--format must be 'text' or 'json', got {output_format!r}")
        out_update["format"] = output_format
    if out_update:
        updates["output"] = config.output.model_copy(update=out_update)
    if updates:
        config = config.model_copy(update=updates)

    network_path = network or config.network
    if network_path is None:
        raise ConfigError("No network given: pass --network or set 'network' in the run config")
    net = load_network(network_path)
    costs = config.costs.to_spec(net)

    start = config.simulation.x0 or [0] * net.n
    state = as_state(net, start)
    resolved_seed = config.simulation.seed
    if resolved_seed is None:
        resolved_seed = EnvSettings().seed
    logger.info(
        "Loaded network %s: n=%d, m_e=%d, m_u=%d", network_path, net.n, net.m_e, net.m_u
    )
    return RunContext(
        config=config,
        net=net,
        costs=costs,
        x0=state,
        seed=resolved_seed,
        out_dir=Path(config.output.out_dir),
    )
