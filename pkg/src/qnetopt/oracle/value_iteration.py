"""Value iteration over all state-feedback policies on the finite state space.

The Bellman bracket for state x is

    q.x + sum_j W_j(x) (V(x + r_j) - V(x))
        + sum_k u_k x_src(k) (v_k + V(x + r_k) - V(x))

which is affine and separable in the controls, so minimising over
u in {0, u_max}^m_u reduces to switching on exactly the controls whose
coefficient is negative. Ties resolve to u_k = 0.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from qnetopt.costate.models import CostSpec
from qnetopt.errors import ConfigError, SolverError
from qnetopt.models import BoolArray, FloatArray
from qnetopt.network.model import QueueNetwork, validate_reachability
from qnetopt.oracle.statespace import EventStencil, StateSpace, max_total_rate

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 1_000_000
DEFAULT_TIE_TOL = 1e-9


class ValueTable(BaseModel):
    """Per-state values and, optionally, the minimising controls.

    ``controls[m, s, k]`` is True when control k is switched on in state s
    during step m (time m * dt). Finite-horizon tables keep every step only
    when asked to; otherwise, like infinite-horizon tables, they hold a single
    leading step and ``dependent_steps`` lists the steps at which the
    minimiser depended on the state, found during the recursion.
    ``ties`` marks the entries whose control coefficient was within the tie
    tolerance of zero, including every state with an empty source queue.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: StateSpace
    values: FloatArray
    controls: BoolArray | None = None
    ties: BoolArray | None = None
    dependent_steps: list[int] | None = None
    dt: float | None = None
    iterations: int = 0

    def value(self, x: object) -> float:
        return float(self.values[self.space.index(x)])

    def linear_fit(self) -> tuple[np.ndarray, float]:
        """Least-squares w with V(x) ~ w.x, and the max absolute residual."""
        states = self.space.states.astype(float)
        w, *_ = np.linalg.lstsq(states, self.values, rcond=None)
        residual = float(np.abs(states @ w - self.values).max()) if self.space.size else 0.0
        return w, residual


class _Bellman:
    """Vectorised Bellman bracket on a fixed stencil."""

    def __init__(
        self, net: QueueNetwork, costs: CostSpec, space: StateSpace, tie_tol: float
    ) -> None:
        stencil = EventStencil.build(net, space)
        m_e = net.m_e
        self._u_max = net.u_max
        self._v = costs.v
        self._exit_targets = stencil.targets[:, :m_e]
        self._exit_rates = stencil.unit_rates[:, :m_e]
        self._route_targets = stencil.targets[:, m_e:]
        self._route_units = stencil.unit_rates[:, m_e:]
        self._stage = space.states @ costs.q
        self._tie_tol = tie_tol

    def __call__(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return the minimised bracket, the on-mask of the minimiser and the tie mask."""
        here = values[:, None]
        drift = (self._exit_rates * (values[self._exit_targets] - here)).sum(axis=1)
        gain = self._route_units * (self._v[None, :] + values[self._route_targets] - here)
        on = gain < 0
        control = self._u_max * np.where(on, gain, 0.0).sum(axis=1)
        scale = max(1.0, float(np.abs(values).max())) if values.size else 1.0
        ties = np.abs(gain) <= self._tie_tol * scale
        return self._stage + drift + control, on, ties


def vi_finite_horizon(
    net: QueueNetwork,
    costs: CostSpec,
    max_units: int,
    horizon: float | None = None,
    steps: int = 10_000,
    record_controls: bool = False,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> ValueTable:
    """Backward recursion V_m = V_{m+1} + dt * min_u bracket(V_{m+1}), V_steps(x) = c.x.

    State dependence of the minimiser is checked step by step, so only the
    step-0 controls are kept unless ``record_controls`` asks for all of them.
    """
    costs.check_against(net)
    horizon = costs.horizon if horizon is None else horizon
    if steps < 1:
        raise ConfigError(f"steps must be positive, got {steps}")
    dt = horizon / steps
    bound = max_total_rate(net, max_units)
    if dt * bound >= 1.0:
        raise ConfigError(
            f"dt={dt:.3g} violates the stability bound dt * {bound:.3g} < 1; "
            f"use more than {int(horizon * bound)} steps"
        )

    space = StateSpace.build(net.n, max_units)
    bellman = _Bellman(net, costs, space, tie_tol)
    values = space.states @ costs.c
    kept = steps if record_controls else 1
    shape = (kept, space.size, net.m_u)
    controls = np.zeros(shape, dtype=bool)
    ties = np.zeros(shape, dtype=bool)
    dependent: list[int] = []

    for m in range(steps - 1, -1, -1):
        bracket, on, tied = bellman(values)
        values = values + dt * bracket
        if _depends_on_state(on, tied):
            dependent.append(m)
        if record_controls or m == 0:
            slot = m if record_controls else 0
            controls[slot] = on
            ties[slot] = tied

    logger.info(
        "Finite-horizon value iteration: %d states, %d steps (dt=%.3g)", space.size, steps, dt
    )
    return ValueTable(
        space=space,
        values=values,
        controls=controls,
        ties=ties,
        dependent_steps=None if record_controls else sorted(dependent),
        dt=dt,
        iterations=steps,
    )


def vi_infinite_horizon(
    net: QueueNetwork,
    costs: CostSpec,
    max_units: int,
    tol: float = 1e-8,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> ValueTable:
    """Value iteration on the uniformised chain until the sup-norm change is below tol."""
    costs.check_against(net)
    report = validate_reachability(net)
    if not report.ok:
        raise SolverError(
            f"Queues {report.unreachable_names} cannot reach an exit; value iteration diverges"
        )
    # the +1 keeps every self-loop probability strictly positive
    uniform_rate = max_total_rate(net, max_units) + 1.0
    space = StateSpace.build(net.n, max_units)
    bellman = _Bellman(net, costs, space, tie_tol)
    values = np.zeros(space.size)
    change = float("inf")

    for iteration in range(1, max_iterations + 1):
        bracket, _, _ = bellman(values)
        updated = values + bracket / uniform_rate
        change = float(np.abs(updated - values).max()) if space.size else 0.0
        values = updated
        if iteration % 10_000 == 0:
            logger.debug("Value iteration %d: sup change %.3g", iteration, change)
        if change < tol:
            _, on, tied = bellman(values)
            logger.info("Infinite-horizon value iteration converged in %d iterations", iteration)
            return ValueTable(
                space=space,
                values=values,
                controls=on[None, :, :],
                ties=tied[None, :, :],
                iterations=iteration,
            )

    raise SolverError(
        f"Value iteration did not converge within {max_iterations} iterations "
        f"(last change {change:.3g}); check that every queue can reach an exit"
    )


def argmin_state_independent(table: ValueTable, net: QueueNetwork) -> list[int]:
    """Steps at which non-tied states disagree on whether some control is on.

    An empty list means the minimising controls depend on time only. States
    with an empty source queue are always tied and never count.
    """
    if table.space.n != net.n:
        raise ValueError(f"value table has n={table.space.n}, network has n={net.n}")
    if table.dependent_steps is not None:
        disagreeing = list(table.dependent_steps)
        checked = table.iterations
    elif table.controls is None or table.ties is None:
        raise ValueError("value table was computed without recording controls")
    else:
        checked = table.controls.shape[0]
        disagreeing = [
            m for m in range(checked) if _depends_on_state(table.controls[m], table.ties[m])
        ]
    if disagreeing:
        logger.warning(
            "Minimising controls depend on the state at %d of %d steps",
            len(disagreeing),
            checked,
        )
    return disagreeing


def _depends_on_state(on: np.ndarray, ties: np.ndarray) -> bool:
    """True if non-tied states disagree on some control at one step."""
    for k in range(on.shape[1]):
        chosen = on[~ties[:, k], k]
        if chosen.size and bool(chosen.any()) != bool(chosen.all()):
            return True
    return False
