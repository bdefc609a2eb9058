"""Queue network model and structural matrices."""

from qnetopt.network.loader import load_network, save_network
from qnetopt.network.model import (
    NetworkDescription,
    NetworkState,
    QueueNetwork,
    QueueSpec,
    ReachabilityReport,
    RouteSpec,
    as_state,
    build_network,
    check_controls,
    event_rates,
    validate_reachability,
)
from qnetopt.network.reference import three_queue_fork, two_queue_chain

__all__ = [
    "NetworkDescription",
    "NetworkState",
    "QueueNetwork",
    "QueueSpec",
    "ReachabilityReport",
    "RouteSpec",
    "as_state",
    "build_network",
    "check_controls",
    "event_rates",
    "load_network",
    "save_network",
    "three_queue_fork",
    "two_queue_chain",
    "validate_reachability",
]
