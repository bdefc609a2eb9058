"""Finite state space of the jump process and its generator.

No event increases the total unit count, so from any x0 with sum(x0) <= N
the chain stays in {x >= 0 : sum(x) <= N}, which has C(N + n, n) states.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from typing import Any

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, PrivateAttr

from qnetopt.errors import SolverError
from qnetopt.models import FloatArray, IntArray
from qnetopt.network.model import QueueNetwork, check_controls

logger = logging.getLogger(__name__)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All non-negative integer vectors of length ``parts`` summing to ``total``, lex-descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


class StateSpace(BaseModel):
    """Graded-lexicographic enumeration of {x >= 0 : sum(x) <= N}."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    max_units: int
    states: IntArray
    _index: dict[tuple[int, ...], int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: Any) -> None:
        self._index.update({tuple(row): i for i, row in enumerate(self.states.tolist())})

    @classmethod
    def build(cls, n: int, max_units: int) -> StateSpace:
        if n < 1 or max_units < 0:
            raise ValueError(f"need n >= 1 and N >= 0, got n={n}, N={max_units}")
        rows = [c for total in range(max_units + 1) for c in _compositions(total, n)]
        space = cls(n=n, max_units=max_units, states=np.array(rows, dtype=np.int64))
        logger.debug("State space n=%d N=%d: %d states", n, max_units, space.size)
        return space

    @staticmethod
    def expected_size(n: int, max_units: int) -> int:
        return math.comb(max_units + n, n)

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    def index(self, x: Any) -> int:
        key = tuple(int(v) for v in np.asarray(x).tolist())
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"state {list(key)} is not in the space (N={self.max_units})") from None

    def contains(self, x: Any) -> bool:
        return tuple(int(v) for v in np.asarray(x).tolist()) in self._index


class EventStencil(BaseModel):
    """Per-state event targets and per-unit rates (exits first, then routes).

    ``unit_rates`` is gamma_j * x_i for exits and x_source for routes, so a
    route's actual rate is u_k times its unit rate. Events that cannot fire
    point back at their own state with unit rate 0.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    targets: IntArray
    unit_rates: FloatArray

    @classmethod
    def build(cls, net: QueueNetwork, space: StateSpace) -> EventStencil:
        if space.n != net.n:
            raise ValueError(f"state space has n={space.n}, network has n={net.n}")
        changes = net.transition_matrix
        event_queue = np.concatenate([net.exit_queues, net.route_sources])
        multipliers = np.concatenate([net.gammas, np.ones(net.m_u)])
        states = space.states
        unit_rates = multipliers[None, :] * states[:, event_queue]
        targets = np.tile(np.arange(space.size)[:, None], (1, changes.shape[1]))
        for s, x in enumerate(states):
            for k in np.flatnonzero(unit_rates[s] > 0):
                nxt = x + changes[:, k]
                if not space.contains(nxt):
                    raise SolverError(f"event {k} leaves the state space from {x.tolist()}")
                targets[s, k] = space.index(nxt)
        return cls(targets=targets, unit_rates=unit_rates)


def build_generator(
    net: QueueNetwork,
    space: StateSpace,
    u: Any,
    stencil: EventStencil | None = None,
) -> sp.csr_matrix:
    """Generator Q(u) with Q[x, x + r_i] = W_i(x, u) and rows summing to zero."""
    controls = check_controls(net, u)
    stencil = stencil or EventStencil.build(net, space)
    rates = stencil.unit_rates * np.concatenate([np.ones(net.m_e), controls])[None, :]
    rows = np.repeat(np.arange(space.size), rates.shape[1])
    cols = stencil.targets.reshape(-1)
    data = rates.reshape(-1)
    keep = (data > 0) & (cols != rows)
    off = sp.coo_matrix(
        (data[keep], (rows[keep], cols[keep])), shape=(space.size, space.size)
    ).tocsr()
    exit_rates = np.asarray(off.sum(axis=1)).reshape(-1)
    return (off - sp.diags(exit_rates)).tocsr()


def point_mass(space: StateSpace, x: Any) -> np.ndarray:
    p = np.zeros(space.size)
    p[space.index(x)] = 1.0
    return p


def distribution_mean(space: StateSpace, p: np.ndarray) -> np.ndarray:
    return np.asarray(p @ space.states, dtype=float)


def max_total_rate(net: QueueNetwork, max_units: int) -> float:
    """Upper bound N (gamma_max + m_u u_max) on the total event rate of any state."""
    return max_units * (net.gamma_max + net.m_u * net.u_max)

