"""Queue network data model: topology, rate parameters and structural matrices.

Symbols used throughout the package:

- ``exit_matrix``   R_E  (n x m_e)  column k is -e_i for exit event k at queue i
- ``route_matrix``  R_D  (n x m_u)  column k is -e_i + e_j for route k from i to j
- ``source_map``    H    (m_u x n)  H[k, i] = 1 iff route k has source queue i
- ``exit_map``      E    (m_e x n)  E[k, i] = 1 iff exit event k occurs at queue i
- ``gamma_matrix``  Gamma (m_e x m_e) diagonal of exit rates

Event columns are ordered exits first, then routes, everywhere an event
index appears (rates, simulation events, generator stencils).
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Mapping
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qnetopt.errors import NetworkError
from qnetopt.models import FloatArray, IntArray

logger = logging.getLogger(__name__)


# ── Declarative description ────────────────────────────────────────────────


class QueueSpec(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)

    name: str
    exit_rate: float = 0.0  # 0 means no exit event at this queue


class RouteSpec(BaseModel):
    """One routing edge. A reference names a queue; an int that matches no
    queue name is taken as a 0-based queue index."""

    model_config = ConfigDict(populate_by_name=True)

    source: str | int = Field(alias="from")
    dest: str | int = Field(alias="to")


class NetworkDescription(BaseModel):
    """The on-disk network format; route order defines control indices."""

    queues: list[QueueSpec]
    routes: list[RouteSpec] = Field(default_factory=list)
    u_max: float = 1.0


# ── Built network ──────────────────────────────────────────────────────────


class QueueNetwork(BaseModel):
    """Immutable network with all structural matrices populated."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    queue_names: tuple[str, ...]
    u_max: float
    exit_queues: IntArray
    gammas: FloatArray
    route_sources: IntArray
    route_dests: IntArray
    exit_matrix: IntArray
    route_matrix: IntArray
    source_map: IntArray
    exit_map: IntArray
    gamma_matrix: FloatArray

    @property
    def n(self) -> int:
        return len(self.queue_names)

    @property
    def m_e(self) -> int:
        return int(self.gammas.shape[0])

    @property
    def m_u(self) -> int:
        return int(self.route_sources.shape[0])

    @property
    def transition_matrix(self) -> np.ndarray:
        """[R_E | R_D]: state change of every event, exits first."""
        return np.hstack([self.exit_matrix, self.route_matrix])

    @property
    def exit_operator(self) -> np.ndarray:
        """R_E Gamma E (n x n): the uncontrolled drift of the mean dynamics."""
        return self.exit_matrix @ self.gamma_matrix @ self.exit_map

    @property
    def gamma_max(self) -> float:
        return float(self.gammas.max()) if self.m_e else 0.0

    @model_validator(mode="after")
    def _check_structure(self) -> QueueNetwork:
        n, m_e, m_u = self.n, self.m_e, self.m_u
        if self.exit_matrix.shape != (n, m_e) or self.route_matrix.shape != (n, m_u):
            raise ValueError("state change matrices have inconsistent shapes")
        if self.source_map.shape != (m_u, n) or self.exit_map.shape != (m_e, n):
            raise ValueError("source/exit maps have inconsistent shapes")
        if m_e:
            if not np.all((self.exit_matrix == -1).sum(axis=0) == 1):
                raise ValueError("every exit column needs exactly one -1")
            if not np.all(self.exit_map.sum(axis=1) == 1):
                raise ValueError("every exit event needs exactly one queue")
        if m_u:
            if not (
                np.all((self.route_matrix == -1).sum(axis=0) == 1)
                and np.all((self.route_matrix == 1).sum(axis=0) == 1)
                and np.all(self.route_matrix.sum(axis=0) == 0)
            ):
                raise ValueError("every route column needs one -1 and one +1")
            if not np.all(self.source_map.sum(axis=1) == 1):
                raise ValueError("every route needs exactly one source queue")
        if np.any(self.gammas <= 0) or self.u_max <= 0:
            raise ValueError("rates must be strictly positive")
        return self

    def to_description(self) -> NetworkDescription:
        rates = dict(zip(self.exit_queues.tolist(), self.gammas.tolist(), strict=True))
        return NetworkDescription(
            queues=[
                QueueSpec(name=name, exit_rate=rates.get(i, 0.0))
                for i, name in enumerate(self.queue_names)
            ],
            routes=[
                RouteSpec(source=self.queue_names[s], dest=self.queue_names[d])
                for s, d in zip(self.route_sources.tolist(), self.route_dests.tolist(), strict=True)
            ],
            u_max=self.u_max,
        )


class NetworkState(BaseModel):
    """Units per queue."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: IntArray

    @model_validator(mode="after")
    def _non_negative(self) -> NetworkState:
        if self.x.ndim != 1 or np.any(self.x < 0):
            raise ValueError("state must be a vector of non-negative integers")
        return self


class ReachabilityReport(BaseModel):
    ok: bool
    unreachable_queues: list[int] = Field(default_factory=list)
    unreachable_names: list[str] = Field(default_factory=list)


# ── Operations ─────────────────────────────────────────────────────────────


def build_network(description: NetworkDescription | Mapping[str, Any]) -> QueueNetwork:
    """Construct a QueueNetwork, deriving R_E, R_D, H, E and Gamma."""
    desc = (
        description
        if isinstance(description, NetworkDescription)
        else NetworkDescription.model_validate(description)
    )
    n = len(desc.queues)
    if n == 0:
        raise NetworkError("A network needs at least one queue")
    names = tuple(q.name for q in desc.queues)
    if len(set(names)) != n:
        raise NetworkError(f"Duplicate queue names in {list(names)}")
    if not desc.u_max > 0:
        raise NetworkError(f"u_max must be positive, got {desc.u_max}")

    exit_queues: list[int] = []
    gammas: list[float] = []
    for i, queue in enumerate(desc.queues):
        if queue.exit_rate < 0:
            raise NetworkError(f"Queue '{queue.name}' has negative exit_rate {queue.exit_rate}")
        if queue.exit_rate > 0:
            exit_queues.append(i)
            gammas.append(queue.exit_rate)

    def resolve(ref: str | int, route_no: int) -> int:
        if str(ref) in names:
            return names.index(str(ref))
        if isinstance(ref, int):
            if not 0 <= ref < n:
                raise NetworkError(f"Route {route_no}: queue index {ref} out of range [0, {n})")
            return ref
        raise NetworkError(f"Route {route_no}: unknown queue '{ref}'")

    sources: list[int] = []
    dests: list[int] = []
    seen: set[tuple[int, int]] = set()
    for k, route in enumerate(desc.routes):
        src, dst = resolve(route.source, k), resolve(route.dest, k)
        if src == dst:
            raise NetworkError(f"Route {k}: source and destination are both '{names[src]}'")
        if (src, dst) in seen:
            raise NetworkError(f"Route {k}: duplicate routing edge {names[src]} -> {names[dst]}")
        seen.add((src, dst))
        sources.append(src)
        dests.append(dst)

    m_e, m_u = len(exit_queues), len(sources)
    exit_map = np.zeros((m_e, n), dtype=np.int64)
    exit_map[np.arange(m_e), exit_queues] = 1
    source_map = np.zeros((m_u, n), dtype=np.int64)
    source_map[np.arange(m_u), sources] = 1
    route_matrix = np.zeros((n, m_u), dtype=np.int64)
    route_matrix[sources, np.arange(m_u)] = -1
    route_matrix[dests, np.arange(m_u)] = 1

    net = QueueNetwork(
        queue_names=names,
        u_max=float(desc.u_max),
        exit_queues=np.array(exit_queues, dtype=np.int64),
        gammas=np.array(gammas, dtype=float),
        route_sources=np.array(sources, dtype=np.int64),
        route_dests=np.array(dests, dtype=np.int64),
        exit_matrix=-exit_map.T,
        route_matrix=route_matrix,
        source_map=source_map,
        exit_map=exit_map,
        gamma_matrix=np.diag(np.array(gammas, dtype=float)).reshape(m_e, m_e),
    )
    logger.debug("Built network: n=%d m_e=%d m_u=%d", n, m_e, m_u)
    return net


def validate_reachability(net: QueueNetwork) -> ReachabilityReport:
    """Check that every queue has a directed routing path to a queue with an exit."""
    reaches = np.zeros(net.n, dtype=bool)
    reaches[net.exit_queues] = True
    incoming: dict[int, list[int]] = {i: [] for i in range(net.n)}
    for src, dst in zip(net.route_sources.tolist(), net.route_dests.tolist(), strict=True):
        incoming[dst].append(src)

    frontier = deque(int(i) for i in net.exit_queues)
    while frontier:
        node = frontier.popleft()
        for src in incoming[node]:
            if not reaches[src]:
                reaches[src] = True
                frontier.append(src)

    bad = [int(i) for i in np.flatnonzero(~reaches)]
    return ReachabilityReport(
        ok=not bad,
        unreachable_queues=bad,
        unreachable_names=[net.queue_names[i] for i in bad],
    )


def as_state(net: QueueNetwork, x: Any) -> np.ndarray:
    """Validate a state vector against the network and return it as an int array."""
    state = NetworkState(x=x).x
    if state.shape != (net.n,):
        raise ValueError(f"state has length {state.shape[0]}, network has {net.n} queues")
    return state


def check_controls(net: QueueNetwork, u: Any) -> np.ndarray:
    """Validate a control vector: length m_u, entries within [0, u_max]."""
    controls = np.asarray(u, dtype=float).reshape(-1)
    if controls.shape != (net.m_u,):
        raise ValueError(f"control vector has length {controls.shape[0]}, expected {net.m_u}")
    if np.any(controls < 0) or np.any(controls > net.u_max):
        raise ValueError(f"controls {controls.tolist()} outside [0, {net.u_max}]")
    return controls


def event_rates(net: QueueNetwork, x: Any, u: Any) -> np.ndarray:
    """Rates of every event in state x under controls u (exits first, then routes)."""
    state = as_state(net, x)
    controls = check_controls(net, u)
    return np.concatenate([
        net.gammas * state[net.exit_queues],
        controls * state[net.route_sources],
    ])
