"""Tests for finite- and infinite-horizon value iteration."""

import math

import numpy as np
import pytest

from qnetopt.costate import CostSpec, solve_costate_fh, solve_costate_ih
from qnetopt.errors import ConfigError, SolverError
from qnetopt.network import build_network, three_queue_fork
from qnetopt.oracle import (
    ValueTable,
    argmin_state_independent,
    vi_finite_horizon,
    vi_infinite_horizon,
)


def _relative_gap(values, reference):
    return np.abs(values - reference).max() / np.abs(reference).max()


def test_fh_empty_space(chain, cheap_routing):
    table = vi_finite_horizon(chain, cheap_routing, 0, steps=100)
    assert table.values.tolist() == [0.0]


def test_fh_single_queue(single_queue):
    costs = CostSpec(q=[2.0], v=[], c=[0.0], horizon=1.0)
    table = vi_finite_horizon(single_queue, costs, 1, steps=10_000)
    assert table.value([1]) == pytest.approx(2 * (1 - math.exp(-1)), abs=1e-3)
    assert table.value([0]) == 0.0


def test_fh_terminal_cost_only(single_queue):
    costs = CostSpec(q=[0.0], v=[], c=[3.0], horizon=2.0)
    table = vi_finite_horizon(single_queue, costs, 2, steps=4000)
    assert table.value([2]) == pytest.approx(6 * math.exp(-2), rel=1e-3)


def test_fh_stability_bound(chain, cheap_routing):
    with pytest.raises(ConfigError, match="stability"):
        vi_finite_horizon(chain, cheap_routing, 6, steps=100)


def test_fh_keeps_only_first_step_by_default(chain, cheap_routing):
    table = vi_finite_horizon(chain, cheap_routing, 2, steps=1000)
    assert table.controls.shape == (1, table.space.size, 1)
    assert table.ties.shape == (1, table.space.size, 1)
    assert table.dependent_steps == []
    assert argmin_state_independent(table, chain) == []

    full = vi_finite_horizon(chain, cheap_routing, 2, steps=1000, record_controls=True)
    assert full.controls.shape == (1000, table.space.size, 1)
    assert full.dependent_steps is None
    np.testing.assert_array_equal(full.controls[0], table.controls[0])
    np.testing.assert_array_equal(full.values, table.values)


def test_fh_memory_stays_flat_in_steps(chain, cheap_routing):
    table = vi_finite_horizon(chain, cheap_routing, 4, steps=50_000)
    assert table.controls.nbytes + table.ties.nbytes == 2 * table.space.size


def test_state_dependence_found_during_recursion_is_reported(chain, cheap_routing):
    table = vi_finite_horizon(chain, cheap_routing, 2, steps=1000)
    flagged = table.model_copy(update={"dependent_steps": [3, 7]})
    assert argmin_state_independent(flagged, chain) == [3, 7]


def test_argmin_needs_controls(chain, cheap_routing):
    table = vi_finite_horizon(chain, cheap_routing, 2, steps=1000)
    bare = ValueTable(space=table.space, values=table.values)
    with pytest.raises(ValueError, match="without recording"):
        argmin_state_independent(bare, chain)
    with pytest.raises(ValueError, match="network has"):
        argmin_state_independent(table, three_queue_fork())


@pytest.mark.slow
def test_fh_matches_linear_costate(chain, cheap_routing, chain_solution):
    table = vi_finite_horizon(chain, cheap_routing, 6, steps=10_000)
    assert table.space.size == 28
    linear = table.space.states @ chain_solution.y0
    assert _relative_gap(linear, table.values) <= 0.01

    w, residual = table.linear_fit()
    np.testing.assert_allclose(w, chain_solution.y0, rtol=0.01)
    assert residual <= 1e-6 * np.abs(table.values).max()


@pytest.mark.slow
def test_fh_controls_do_not_depend_on_state(chain, cheap_routing, chain_solution):
    assert argmin_state_independent(vi_finite_horizon(chain, cheap_routing, 6), chain) == []
    table = vi_finite_horizon(chain, cheap_routing, 6, steps=10_000, record_controls=True)
    assert argmin_state_independent(table, chain) == []
    # routing is on at the start and off at the end for every occupied source
    occupied = table.space.states[:, 0] > 0
    assert table.controls[0, occupied, 0].all()
    assert not table.controls[-1, occupied, 0].any()


@pytest.mark.slow
def test_fh_values_monotone_in_state(chain, cheap_routing):
    table = vi_finite_horizon(chain, cheap_routing, 6, steps=10_000)
    space = table.space
    for x in space.states:
        for i in range(space.n):
            bigger = x.copy()
            bigger[i] += 1
            if space.contains(bigger):
                assert table.value(bigger) >= table.value(x)


def test_argmin_detects_state_dependence(chain, cheap_routing):
    table = vi_finite_horizon(chain, cheap_routing, 2, steps=1000, record_controls=True)
    controls = table.controls.copy()
    controls[5, table.space.index([2, 0]), 0] = not controls[5, table.space.index([1, 0]), 0]
    tampered = table.model_copy(update={"controls": controls})
    assert argmin_state_independent(tampered, chain) == [5]


def test_ih_empty_space(chain, cheap_routing):
    assert vi_infinite_horizon(chain, cheap_routing, 0).values.tolist() == [0.0]


def test_ih_single_queue(single_queue):
    costs = CostSpec(q=[2.0], v=[], c=[0.0], horizon=1.0)
    table = vi_infinite_horizon(single_queue, costs, 1, tol=1e-12)
    assert table.value([1]) == pytest.approx(2.0, rel=1e-6)


@pytest.mark.slow
def test_ih_matches_stationary_costate(chain, cheap_routing):
    table = vi_infinite_horizon(chain, cheap_routing, 6, tol=1e-8)
    linear = table.space.states @ np.array([2.25, 1.0])
    assert _relative_gap(linear, table.values) <= 0.01
    occupied = table.space.states[:, 0] > 0
    assert table.controls[0, occupied, 0].all()
    np.testing.assert_allclose(
        table.values, table.space.states @ solve_costate_ih(chain, cheap_routing).y, rtol=1e-5
    )


def test_ih_requires_reachability():
    net = build_network({
        "queues": [{"name": "a", "exit_rate": 1.0}, {"name": "b"}],
        "routes": [{"from": "a", "to": "b"}],
    })
    costs = CostSpec(q=[1.0, 1.0], v=[0.1], c=[0.0, 0.0], horizon=1.0)
    with pytest.raises(SolverError, match="cannot reach an exit"):
        vi_infinite_horizon(net, costs, 2)


def test_ih_iteration_cap(chain, cheap_routing):
    with pytest.raises(SolverError, match="did not converge"):
        vi_infinite_horizon(chain, cheap_routing, 4, tol=1e-12, max_iterations=3)


@pytest.mark.slow
def test_fork_random_parameters_agree_with_costate():
    rng = np.random.default_rng(1234)
    for _ in range(20):
        g1, g2, g3 = rng.uniform(0.3, 3.0, size=3)
        net = three_queue_fork(g1, g2, g3, u_max=1.0)
        costs = CostSpec(
            q=rng.uniform(0.5, 3.0, size=3),
            v=rng.uniform(0.5, 3.0, size=2),
            c=[0.0, 0.0, 0.0],
            horizon=10.0,
        )
        traj = solve_costate_fh(net, costs)
        table = vi_finite_horizon(net, costs, 4, steps=10_000)
        linear = table.space.states @ traj.y0
        assert _relative_gap(linear, table.values) <= 0.015

        s0 = traj.switching_function(net, costs, 0.0)
        occupied = table.space.states[:, 0] > 0
        for k in range(net.m_u):
            if abs(s0[k]) < 1e-2 * max(1.0, float(np.abs(traj.y0).max())):
                continue
            chosen = table.controls[0, occupied, k]
            assert chosen.all() if s0[k] < 0 else not chosen.any()
