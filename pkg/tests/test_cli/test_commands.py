"""End-to-end tests of the qnetopt commands."""

import json
import math
import re

import pytest
from typer.testing import CliRunner

from qnetopt import __version__
from qnetopt.artifacts import read_model
from qnetopt.cli.main import app
from qnetopt.costate import CostateTrajectory

runner = CliRunner()


def _run(*args):
    return runner.invoke(app, [str(a) for a in args])


def _value(output):
    match = re.search(r"value= (\S+)", output)
    assert match, output
    return float(match.group(1))


@pytest.fixture
def solved(chain_files, tmp_path):
    """Chain files plus a finite-horizon solve already written to the output dir."""
    network, config = chain_files
    result = _run("solve-fh", "-n", network, "-c", config)
    assert result.exit_code == 0, result.output
    return network, config, tmp_path / "out"


def test_version():
    result = _run("version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_solve_fh_writes_artifacts(solved):
    _, _, out = solved
    costate = json.loads((out / "costate.json").read_text())
    policy = json.loads((out / "policy.json").read_text())
    assert costate["horizon"] == 10.0
    assert policy["controls"][0]["initial"] == 1.0
    # off-regime costate near T gives s = 1 - 1.5 (1 - e^-(T - t))
    assert policy["controls"][0]["switches"] == [pytest.approx(10.0 - math.log(3.0), abs=1e-6)]


def test_solve_fh_value(chain_files, tmp_path):
    network, config = chain_files
    result = _run("solve-fh", "-n", network, "-c", config, "--x0", "1,0")
    assert result.exit_code == 0, result.output
    y0 = json.loads((tmp_path / "out" / "costate.json").read_text())["y"][0]
    assert _value(result.output) == pytest.approx(y0[0])
    assert "u_1: starts on" in result.output


def test_solve_fh_expensive_routing(chain_files, tmp_path):
    network, _ = chain_files
    config = tmp_path / "expensive.yaml"
    config.write_text(f"costs:\n  q: [2.5, 1.0]\n  v: [2.0]\n  T: 10.0\n"
                      f"output:\n  out_dir: {tmp_path / 'exp'}\n")
    result = _run("solve-fh", "-n", network, "-c", config, "--format", "json")
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["switch_times"] == [[]]
    assert data["active_at_start"] == [False]


def test_solve_ih(chain_files, tmp_path):
    network, config = chain_files
    result = _run("solve-ih", "-n", network, "-c", config)
    assert result.exit_code == 0, result.output
    assert _value(result.output) == pytest.approx(112.5)
    assert "active_set= [1]" in result.output
    assert (tmp_path / "out" / "costate_ih.json").exists()
    assert (tmp_path / "out" / "policy_ih.json").exists()


def test_solve_ih_json(chain_files):
    network, config = chain_files
    result = _run("solve-ih", "-n", network, "-c", config, "--format", "json")
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["y"] == pytest.approx([2.25, 1.0])
    assert data["active_set"] == [1]
    assert data["degenerate"] is False


def test_missing_network_file(chain_files, tmp_path):
    _, config = chain_files
    result = _run("solve-fh", "-n", tmp_path / "nope.json", "-c", config)
    assert result.exit_code == 2


def test_missing_network_flag(chain_files):
    _, config = chain_files
    assert _run("solve-fh", "-c", config).exit_code == 2


def test_bad_format_flag(chain_files):
    network, config = chain_files
    assert _run("solve-fh", "-n", network, "-c", config, "--format", "xml").exit_code == 2


def test_ih_unreachable_queue_is_solver_error(tmp_path):
    network = tmp_path / "dead.json"
    network.write_text(json.dumps({
        "queues": [{"name": "a", "exit_rate": 1.0}, {"name": "b"}],
        "routes": [{"from": "a", "to": "b"}],
    }))
    config = tmp_path / "dead.yaml"
    config.write_text(f"costs:\n  q: [1.0, 1.0]\n  v: [0.5]\noutput:\n  out_dir: {tmp_path}\n")
    assert _run("solve-ih", "-n", network, "-c", config).exit_code == 3


def test_simulate_is_deterministic(solved, tmp_path):
    network, config, out = solved
    policy = out / "policy.json"
    first = _run("simulate", "-n", network, "-c", config, "-p", policy, "-o", tmp_path / "a")
    second = _run("simulate", "-n", network, "-c", config, "-p", policy, "-o", tmp_path / "b")
    assert first.exit_code == 0, first.output
    assert second.exit_code == 0, second.output
    a = json.loads((tmp_path / "a" / "estimate.json").read_text())
    b = json.loads((tmp_path / "b" / "estimate.json").read_text())
    assert a == b
    assert a["trials"] == 200
    assert a["ci95_low"] < a["mean"] < a["ci95_high"]
    assert "mean= " in first.output


def test_single_trial_writes_identical_paths(solved, tmp_path):
    network, config, out = solved
    policy = out / "policy.json"
    for name in ("a", "b"):
        result = _run(
            "simulate", "-n", network, "-c", config, "-p", policy, "-t", 1, "-o", tmp_path / name
        )
        assert result.exit_code == 0, result.output
        assert not (tmp_path / name / "estimate.json").exists()
    first = (tmp_path / "a" / "trajectory_0.csv").read_bytes()
    assert first == (tmp_path / "b" / "trajectory_0.csv").read_bytes()
    assert first.startswith(b"time,event,x_1,x_2\n0.0,-1,50,0\n")


def test_seed_changes_paths(solved, tmp_path):
    network, config, out = solved
    policy = out / "policy.json"
    for name, seed in (("a", 1), ("b", 2)):
        _run("simulate", "-n", network, "-c", config, "-p", policy, "-t", 1, "-s", seed,
             "-o", tmp_path / name)
    first = (tmp_path / "a" / "trajectory_0.csv").read_bytes()
    assert first != (tmp_path / "b" / "trajectory_0.csv").read_bytes()


def test_simulate_horizon_mismatch(solved, tmp_path):
    network, _, out = solved
    config = tmp_path / "short.yaml"
    config.write_text("costs:\n  q: [2.5, 1.0]\n  v: [1.0]\n  T: 5.0\n")
    result = _run("simulate", "-n", network, "-c", config, "-p", out / "policy.json")
    assert result.exit_code == 2


def test_simulate_without_policy(chain_files, tmp_path):
    network, config = chain_files
    result = _run("simulate", "-n", network, "-c", config, "-o", tmp_path / "empty")
    assert result.exit_code == 2


def test_validate_all_passes(chain_files, tmp_path):
    network, config = chain_files
    result = _run("validate", "-n", network, "-c", config, "--oracle-n", 6, "--mode", "all")
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "validation.json").read_text())
    assert report["passed"] is True
    assert report["max_units"] == 6
    assert {c["name"] for c in report["checks"]} == {
        "vi_fh_value",
        "vi_fh_linearity",
        "vi_state_independent",
        "vi_ih_value",
        "mean_ode_cost",
        "kolmogorov_mean",
        "hjb_residual",
    }
    assert (tmp_path / "out" / "value_table.csv").exists()


def test_validate_detects_perturbed_costate(chain_files, tmp_path):
    network, config = chain_files
    result = _run("validate", "-n", network, "-c", config, "--mode", "hjb", "--perturb-y", 0.1)
    assert result.exit_code == 1
    report = json.loads((tmp_path / "out" / "validation.json").read_text())
    assert report["passed"] is False
    assert report["checks"][0]["deviation"] > 1e-3


def test_validate_state_space_cap(chain_files):
    network, config = chain_files
    result = _run("validate", "-n", network, "-c", config, "--mode", "vi", "--oracle-n", 1000)
    assert result.exit_code == 2


def test_validate_unknown_mode(chain_files):
    network, config = chain_files
    assert _run("validate", "-n", network, "-c", config, "--mode", "exact").exit_code == 2


def test_emit_plot(solved, tmp_path):
    network, config, out = solved
    sim = _run("simulate", "-n", network, "-c", config, "-t", 1)
    assert sim.exit_code == 0, sim.output
    result = _run("emit-plot", "-n", network, "-c", config, "--points", 11, "--grid-max", 2)
    assert result.exit_code == 0, result.output

    policy_lines = (out / "policy.csv").read_text().splitlines()
    assert policy_lines[0] == "time,u_1"
    # 11 grid points plus the switch time
    assert len(policy_lines) == 1 + 12
    assert policy_lines[1] == "0.0,1.0"
    assert policy_lines[-1] == "10.0,0.0"

    states = (out / "states.csv").read_text().splitlines()
    assert states[0] == "path,time,event,x_1,x_2"
    assert states[1] == "0,0.0,-1,50,0"

    mean = (out / "mean.csv").read_text().splitlines()
    assert mean[0] == "time,mu_1,mu_2"
    assert mean[1] == "0.0,50.0,0.0"

    grid = (out / "value_grid.csv").read_text().splitlines()
    assert grid[0] == "x_1,x_2,V"
    assert len(grid) == 1 + 9
    assert grid[1] == "0,0,0.0"


def test_emit_plot_skips_empty_paths(solved, tmp_path):
    network, config, out = solved
    _run("simulate", "-n", network, "-c", config, "-t", 1, "--x0", "0,0")
    result = _run("emit-plot", "-n", network, "-c", config, "--x0", "0,0")
    assert result.exit_code == 0, result.output
    assert (out / "states.csv").read_text() == "path,time,event,x_1,x_2\n"


def test_emit_plot_missing_artifacts(chain_files, tmp_path):
    network, config = chain_files
    result = _run("emit-plot", "-n", network, "-c", config, "-o", tmp_path / "empty")
    assert result.exit_code == 2


def test_emit_plot_value_grid_follows_policy_horizon(solved):
    network, config, out = solved
    ih = _run("solve-ih", "-n", network, "-c", config)
    assert ih.exit_code == 0, ih.output

    result = _run(
        "emit-plot", "-n", network, "-c", config, "-p", out / "policy_ih.json", "--grid-max", 2
    )
    assert result.exit_code == 0, result.output
    grid = (out / "value_grid.csv").read_text().splitlines()
    assert grid[2].startswith("0,1,")
    assert float(grid[2].split(",")[-1]) == pytest.approx(1.0)
    assert grid[4].startswith("1,0,")
    assert float(grid[4].split(",")[-1]) == pytest.approx(2.25)

    result = _run("emit-plot", "-n", network, "-c", config, "--grid-max", 2)
    assert result.exit_code == 0, result.output
    y0 = read_model(out / "costate.json", CostateTrajectory).y0
    grid = (out / "value_grid.csv").read_text().splitlines()
    assert float(grid[4].split(",")[-1]) == pytest.approx(y0[0])
    assert y0[0] != pytest.approx(2.25)


def test_emit_plot_stationary_policy_needs_its_costate(solved):
    network, config, out = solved
    assert _run("solve-ih", "-n", network, "-c", config).exit_code == 0
    (out / "costate_ih.json").unlink()
    result = _run("emit-plot", "-n", network, "-c", config, "-p", out / "policy_ih.json")
    assert result.exit_code == 2
    assert "solve-ih" in result.output


def test_zero_costs_give_zero_value(chain_files, tmp_path):
    network, _ = chain_files
    config = tmp_path / "free.yaml"
    config.write_text(f"costs:\n  q: [0.0, 0.0]\n  v: [1.0]\n  T: 10.0\n"
                      f"output:\n  out_dir: {tmp_path / 'free'}\n")
    result = _run("solve-fh", "-n", network, "-c", config, "--x0", "50,0")
    assert result.exit_code == 0, result.output
    assert _value(result.output) == 0.0
    policy = json.loads((tmp_path / "free" / "policy.json").read_text())
    assert policy["controls"] == [{"initial": 0.0, "switches": []}]


def test_solve_ih_expensive_routing_has_empty_active_set(chain_files, tmp_path):
    network, config = chain_files
    result = _run("solve-ih", "-n", network, "-c", config, "--format", "json")
    assert result.exit_code == 0, result.output
    cheap = json.loads(result.stdout)
    expensive_config = tmp_path / "expensive.yaml"
    expensive_config.write_text(f"costs:\n  q: [2.5, 1.0]\n  v: [2.0]\n"
                                f"output:\n  out_dir: {tmp_path / 'exp'}\n")
    result = _run("solve-ih", "-n", network, "-c", expensive_config, "--format", "json")
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["active_set"] == []
    assert data["y"] == pytest.approx([2.5, 1.0])
    assert cheap["active_set"] == [1]


def test_simulate_empty_start(solved, tmp_path):
    network, config, out = solved
    result = _run("simulate", "-n", network, "-c", config, "--x0", "0,0", "-o", tmp_path / "z",
                  "-p", out / "policy.json")
    assert result.exit_code == 0, result.output
    estimate = json.loads((tmp_path / "z" / "estimate.json").read_text())
    assert estimate["mean"] == 0.0
    assert estimate["std_error"] == 0.0


@pytest.mark.slow
def test_simulated_mean_agrees_with_solved_value(solved, tmp_path):
    network, config, out = solved
    y0 = json.loads((out / "costate.json").read_text())["y"][0]
    result = _run("simulate", "-n", network, "-c", config, "-t", 1000, "--format", "json")
    assert result.exit_code == 0, result.output
    estimate = json.loads((out / "estimate.json").read_text())
    assert abs(estimate["mean"] - 50 * y0[0]) <= 3 * estimate["std_error"]


def test_validate_with_empty_state_space(chain_files, tmp_path):
    network, config = chain_files
    result = _run("validate", "-n", network, "-c", config, "--oracle-n", 0, "--format", "json")
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "validation.json").read_text())
    assert report["max_units"] == 0
    assert report["passed"] is True
