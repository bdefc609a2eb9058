"""Open-loop bang-bang routing policies."""

from __future__ import annotations

import logging
from bisect import bisect_right
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qnetopt.costate.models import CostateTrajectory, CostSpec, IhSolution
from qnetopt.costate.solver import switching_values
from qnetopt.network.model import QueueNetwork

logger = logging.getLogger(__name__)


class ControlSchedule(BaseModel):
    """Initial value of one control plus the times at which it toggles."""

    model_config = ConfigDict(frozen=True)

    initial: float
    switches: list[float] = Field(default_factory=list)


class BangBangPolicy(BaseModel):
    """Piecewise-constant controls taking only the values 0 and u_max.

    ``horizon`` is None for infinite-horizon policies, which never switch.
    Evaluation is right-continuous: at a switch time the new value applies.
    """

    model_config = ConfigDict(frozen=True)

    u_max: float = Field(gt=0)
    horizon: float | None = None
    controls: list[ControlSchedule] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_schedules(self) -> BangBangPolicy:
        for k, ctrl in enumerate(self.controls):
            if ctrl.initial not in (0.0, self.u_max):
                raise ValueError(
                    f"control {k}: initial value {ctrl.initial} is not 0 or u_max={self.u_max}"
                )
            if self.horizon is None and ctrl.switches:
                raise ValueError(f"control {k}: infinite-horizon policies cannot switch")
            if any(b <= a for a, b in zip(ctrl.switches, ctrl.switches[1:], strict=False)):
                raise ValueError(f"control {k}: switch times must be strictly increasing")
            if self.horizon is not None and any(
                not 0.0 < s < self.horizon for s in ctrl.switches
            ):
                raise ValueError(f"control {k}: switch times must lie in (0, {self.horizon})")
        return self

    @property
    def m_u(self) -> int:
        return len(self.controls)

    @property
    def is_infinite_horizon(self) -> bool:
        return self.horizon is None

    def evaluate(self, t: float) -> np.ndarray:
        """Control vector at time t."""
        if t < 0 or (self.horizon is not None and t > self.horizon):
            raise ValueError(f"t={t} outside the policy horizon [0, {self.horizon}]")
        values = np.empty(self.m_u)
        for k, ctrl in enumerate(self.controls):
            toggles = bisect_right(ctrl.switches, t)
            on = (ctrl.initial == self.u_max) != (toggles % 2 == 1)
            values[k] = self.u_max if on else 0.0
        return values

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        """Sorted distinct switch times of any control in the open interval (t0, t1)."""
        return sorted({s for ctrl in self.controls for s in ctrl.switches if t0 < s < t1})


def extract_policy(
    source: CostateTrajectory | IhSolution | np.ndarray,
    costs: CostSpec,
    net: QueueNetwork,
) -> BangBangPolicy:
    """u_k = u_max wherever s_k = y.r_k + v_k < 0, else 0."""
    costs.check_against(net)
    if isinstance(source, CostateTrajectory):
        controls = [
            ControlSchedule(initial=net.u_max if on else 0.0, switches=list(times))
            for on, times in zip(source.active_at_start, source.switch_times, strict=True)
        ]
        return BangBangPolicy(u_max=net.u_max, horizon=source.horizon, controls=controls)

    if isinstance(source, IhSolution):
        active = set(source.active_set)
    else:
        s = switching_values(net, costs, np.asarray(source, dtype=float))
        active = {int(k) for k in np.flatnonzero(s < 0)}
    return BangBangPolicy(
        u_max=net.u_max,
        horizon=None,
        controls=[
            ControlSchedule(initial=net.u_max if k in active else 0.0) for k in range(net.m_u)
        ],
    )


def constant_policy(
    u: Sequence[float], u_max: float, horizon: float | None = None,
) -> BangBangPolicy:
    """Switch-free policy; every entry must be exactly 0 or u_max."""
    return BangBangPolicy(
        u_max=u_max,
        horizon=horizon,
        controls=[ControlSchedule(initial=float(value)) for value in u],
    )


def one_switch_policy(
    u_max: float, horizon: float, initial: Sequence[float], switch: float,
) -> BangBangPolicy:
    """Competitor policy where every control toggles once, at ``switch``."""
    return BangBangPolicy(
        u_max=u_max,
        horizon=horizon,
        controls=[ControlSchedule(initial=float(value), switches=[switch]) for value in initial],
    )
