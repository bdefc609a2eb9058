"""The two reference topologies used throughout the examples and tests."""

from __future__ import annotations

from qnetopt.network.model import QueueNetwork, build_network


def two_queue_chain(gamma1: float = 1.0, gamma2: float = 1.0, u_max: float = 1.0) -> QueueNetwork:
    """X1 -> X2, both queues with their own exit."""
    return build_network({
        "queues": [
            {"name": "X1", "exit_rate": gamma1},
            {"name": "X2", "exit_rate": gamma2},
        ],
        "routes": [{"from": "X1", "to": "X2"}],
        "u_max": u_max,
    })


def three_queue_fork(
    gamma1: float = 1.0, gamma2: float = 1.0, gamma3: float = 1.0, u_max: float = 1.0,
) -> QueueNetwork:
    """X1 -> X2 and X1 -> X3; both controls drain queue 1."""
    return build_network({
        "queues": [
            {"name": "X1", "exit_rate": gamma1},
            {"name": "X2", "exit_rate": gamma2},
            {"name": "X3", "exit_rate": gamma3},
        ],
        "routes": [{"from": "X1", "to": "X2"}, {"from": "X1", "to": "X3"}],
        "u_max": u_max,
    })
