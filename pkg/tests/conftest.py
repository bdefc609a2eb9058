"""Shared fixtures: the two-queue chain and three-queue fork with their cost settings."""

import json

import pytest

from qnetopt.costate import CostSpec, solve_costate_fh
from qnetopt.network import build_network, three_queue_fork, two_queue_chain
from qnetopt.policy import extract_policy


@pytest.fixture
def chain():
    return two_queue_chain(gamma1=1.0, gamma2=1.0, u_max=1.0)


@pytest.fixture
def fork():
    return three_queue_fork(gamma1=1.0, gamma2=0.5, gamma3=2.0, u_max=1.0)


@pytest.fixture
def single_queue():
    return build_network({"queues": [{"name": "A", "exit_rate": 1.0}]})


@pytest.fixture
def cheap_routing():
    """Low control cost: route everything until shortly before T."""
    return CostSpec(q=[2.5, 1.0], v=[1.0], c=[0.0, 0.0], horizon=10.0)


@pytest.fixture
def expensive_routing():
    """High control cost: never route."""
    return CostSpec(q=[2.5, 1.0], v=[2.0], c=[0.0, 0.0], horizon=10.0)


@pytest.fixture
def chain_solution(chain, cheap_routing):
    return solve_costate_fh(chain, cheap_routing)


@pytest.fixture
def chain_policy(chain, cheap_routing, chain_solution):
    return extract_policy(chain_solution, cheap_routing, chain)


@pytest.fixture
def chain_files(tmp_path):
    """Network and run config files for the chain with cheap routing."""
    network = tmp_path / "chain.json"
    network.write_text(json.dumps({
        "queues": [{"name": "X1", "exit_rate": 1.0}, {"name": "X2", "exit_rate": 1.0}],
        "routes": [{"from": "X1", "to": "X2"}],
        "u_max": 1.0,
    }))
    config = tmp_path / "run.yaml"
    config.write_text(
        "costs:\n"
        "  q: [2.5, 1.0]\n"
        "  v: [1.0]\n"
        "  c: [0.0, 0.0]\n"
        "  T: 10.0\n"
        "simulation:\n"
        "  x0: [50, 0]\n"
        "  trials: 200\n"
        "  seed: 7\n"
        f"output:\n  out_dir: {tmp_path / 'out'}\n"
    )
    return network, config
