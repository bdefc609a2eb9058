"""Costate solvers for the finite- and infinite-horizon routing problems.

With a linear value function V(x, t) = y(t).x, the HJB equation reduces to
an ODE in y. Writing s = R_D^T y + v, the finite-horizon costate obeys

    -dy/dt = q + (R_E Gamma E)^T y + u_max H^T min(s, 0),   y(T) = c

and the optimal control switches u_k to u_max exactly where s_k < 0. The
infinite-horizon costate solves the same equation with dy/dt = 0.
"""

from __future__ import annotations

import logging
from itertools import combinations
from typing import Literal

import numpy as np

from qnetopt.costate.models import CostateTrajectory, CostSpec, IhSolution
from qnetopt.errors import SolverError
from qnetopt.network.model import NetworkState, QueueNetwork, validate_reachability
from qnetopt.numerics import rk4_step

logger = logging.getLogger(__name__)

DEFAULT_DT_FRACTION = 1e-3
DEFAULT_SWITCH_TOL_FRACTION = 1e-8
MAX_SWITCHES = 10_000
IH_HORIZON_FACTOR = 100.0
SINGULAR_COND = 1e12


def switching_values(net: QueueNetwork, costs: CostSpec, y: np.ndarray) -> np.ndarray:
    """s = R_D^T y + v for every control."""
    return net.route_matrix.T @ y + costs.v


def costate_rhs(net: QueueNetwork, costs: CostSpec, y: np.ndarray) -> np.ndarray:
    """dy/dtau with tau = T - t, so integrating forward from y(tau=0) = c solves backwards."""
    costs.check_against(net)
    s = switching_values(net, costs, y)
    control = net.source_map.T @ (0.5 * net.u_max * (s - np.abs(s)))
    return costs.q + net.exit_operator.T @ y + control


def solve_costate_fh(
    net: QueueNetwork,
    costs: CostSpec,
    dt: float | None = None,
    switch_tol: float | None = None,
) -> CostateTrajectory:
    """Integrate the costate backwards from y(T) = c with fixed-step RK4.

    Any step over which some s_k changes sign is bisected down to
    ``switch_tol``; the located switch point is inserted into the grid and
    integration resumes from it, so every grid interval lies in one regime.
    """
    costs.check_against(net)
    horizon = costs.horizon
    dt = DEFAULT_DT_FRACTION * horizon if dt is None else dt
    switch_tol = DEFAULT_SWITCH_TOL_FRACTION * horizon if switch_tol is None else switch_tol
    if dt <= 0 or switch_tol <= 0:
        raise ValueError(f"dt and switch_tol must be positive (dt={dt}, switch_tol={switch_tol})")
    if not validate_reachability(net).ok:
        logger.warning("Network fails the reachability check; solving finite horizon anyway")

    def rhs(y: np.ndarray) -> np.ndarray:
        return costate_rhs(net, costs, y)

    def active(y: np.ndarray) -> np.ndarray:
        return switching_values(net, costs, y) < 0

    tau = 0.0
    y = costs.c.astype(float).copy()
    state_on = active(y)
    taus = [tau]
    ys = [y]
    switch_taus: list[list[float]] = [[] for _ in range(net.m_u)]
    n_switches = 0

    while tau < horizon:
        h = min(dt, horizon - tau)
        if horizon - (tau + h) < 1e-9 * dt:
            h = horizon - tau
        y_new = rk4_step(rhs, y, h)
        if not np.all(np.isfinite(y_new)):
            raise SolverError(
                f"Costate blew up near t={horizon - tau - h:.6g}; reduce dt (currently {dt:.3g})"
            )

        if np.any(active(y_new) != state_on):
            lo, hi = 0.0, h
            while hi - lo > switch_tol:
                mid = 0.5 * (lo + hi)
                if np.any(active(rk4_step(rhs, y, mid)) != state_on):
                    hi = mid
                else:
                    lo = mid
            h = hi
            y_new = rk4_step(rhs, y, h)
            flipped = np.flatnonzero(active(y_new) != state_on)
            for k in flipped:
                switch_taus[k].append(tau + h)
            n_switches += len(flipped)
            if n_switches > MAX_SWITCHES:
                raise SolverError(
                    f"More than {MAX_SWITCHES} switches; the switching function is chattering"
                )
            logger.debug("Switch of controls %s at t=%.10g", flipped.tolist(), horizon - tau - h)
            state_on = active(y_new)

        tau = horizon if h >= horizon - tau else tau + h
        y = y_new
        taus.append(tau)
        ys.append(y)

    grid = horizon - np.array(taus[::-1])
    grid[0], grid[-1] = 0.0, horizon
    y_grid = np.array(ys[::-1])
    ydot = -np.array([rhs(row) for row in y_grid])

    active_at_start = state_on.tolist()
    switch_times: list[list[float]] = []
    for k, taus_k in enumerate(switch_taus):
        times = sorted(horizon - tk for tk in taus_k)
        # a switch at t = 0 only affects a single instant
        while times and times[0] <= 0.0:
            times.pop(0)
            active_at_start[k] = not active_at_start[k]
        switch_times.append(times)

    _check_non_negative(y_grid)

    logger.info(
        "Finite-horizon costate: %d grid points, switches per control %s",
        len(grid), [len(s) for s in switch_times],
    )
    return CostateTrajectory(
        horizon=horizon,
        grid=grid,
        y=y_grid,
        ydot=ydot,
        switch_times=switch_times,
        active_at_start=active_at_start,
    )


def solve_costate_ih(
    net: QueueNetwork,
    costs: CostSpec,
    method: Literal["enumerate", "integrate"] = "enumerate",
) -> IhSolution:
    """Solve the stationary costate equation.

    ``enumerate`` tries every candidate active set S in order of increasing
    size (lexicographic within a size) and solves the linear system

        y^T (R_E Gamma E + u_max sum_{k in S} r_k h_k^T) = -q^T - u_max sum_{k in S} v_k h_k^T

    accepting S when the solved y switches on exactly the controls in S.
    ``integrate`` reads y(0) off a long finite-horizon solve with c = 0.
    """
    costs.check_against(net)
    report = validate_reachability(net)
    if not report.ok:
        raise SolverError(
            f"Queues {report.unreachable_names} cannot reach an exit; infinite-horizon cost "
            "is unbounded"
        )
    if method == "integrate":
        return _solve_ih_by_integration(net, costs)

    base = net.exit_operator
    r_d = net.route_matrix.astype(float)
    h = net.source_map.astype(float)
    consistent: list[tuple[tuple[int, ...], np.ndarray]] = []
    singular = 0
    total = 0

    for size in range(net.m_u + 1):
        for subset in combinations(range(net.m_u), size):
            total += 1
            idx = list(subset)
            a = base + net.u_max * r_d[:, idx] @ h[idx, :]
            b = -(costs.q + net.u_max * costs.v[idx] @ h[idx, :])
            if np.linalg.cond(a) > SINGULAR_COND:
                singular += 1
                logger.debug("Active set %s: singular system, skipped", subset)
                continue
            y = np.linalg.solve(a.T, b)
            s = switching_values(net, costs, y)
            tol = 1e-12 * max(1.0, float(np.abs(y).max()))
            on = np.zeros(net.m_u, dtype=bool)
            on[idx] = True
            if np.all(s[on] < tol) and np.all(s[~on] >= -tol):
                consistent.append((subset, y))
            else:
                logger.debug("Active set %s: inconsistent, s=%s", subset, s.tolist())

    if not consistent:
        if singular == total:
            raise SolverError("Every candidate system is singular; dynamics are not absorbing")
        raise SolverError("No active set is consistent with its own costate; model inconsistent")

    subset, y = consistent[0]
    degenerate = len(consistent) > 1
    if degenerate:
        logger.warning(
            "Stationary costate is degenerate: %d consistent active sets, returning %s",
            len(consistent), list(subset),
        )
    _check_non_negative(y)
    logger.info("Infinite-horizon costate: active set %s", list(subset))
    return IhSolution(y=y, active_set=list(subset), degenerate=degenerate, method="enumerate")


def _solve_ih_by_integration(net: QueueNetwork, costs: CostSpec) -> IhSolution:
    if net.m_e == 0:
        raise SolverError("No exit events; dynamics are not absorbing")
    gamma_min = float(net.gammas.min())
    long_run = costs.with_horizon(IH_HORIZON_FACTOR / gamma_min, zero_terminal=True)
    traj = solve_costate_fh(net, long_run)
    y = traj.y0
    _check_non_negative(y)
    active = np.flatnonzero(switching_values(net, costs, y) < 0)
    return IhSolution(y=y, active_set=active.tolist(), method="integrate")


def _check_non_negative(y: np.ndarray) -> None:
    scale = max(1.0, float(np.abs(y).max())) if y.size else 1.0
    if np.any(y < -1e-9 * scale):
        raise SolverError("Costate became negative although all costs are non-negative")


def value_at(
    solution: CostateTrajectory | IhSolution, x: object, t: float | None = None,
) -> float:
    """Expected optimal cost-to-go y(t).x (finite horizon) or y.x (infinite horizon)."""
    state = NetworkState(x=x).x.astype(float)
    if isinstance(solution, IhSolution):
        return float(solution.y @ state)
    if t is None:
        raise ValueError("a finite-horizon value needs a time t")
    return float(solution.y_at(t) @ state)

