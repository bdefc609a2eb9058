"""Cost coefficients and costate solutions."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, model_validator

from qnetopt.errors import ConfigError
from qnetopt.models import FloatArray
from qnetopt.network.model import QueueNetwork


class CostSpec(BaseModel):
    """Linear stage cost q.x + v.(U H x) and terminal cost c.x(T)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    q: FloatArray
    v: FloatArray
    c: FloatArray
    horizon: float = Field(default=10.0, gt=0, validation_alias=AliasChoices("horizon", "T"))

    @model_validator(mode="after")
    def _non_negative(self) -> CostSpec:
        for name in ("q", "v", "c"):
            arr = getattr(self, name)
            if arr.ndim != 1 or np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be a vector of non-negative finite numbers")
        return self

    def check_against(self, net: QueueNetwork) -> None:
        if self.q.shape != (net.n,) or self.c.shape != (net.n,):
            raise ConfigError(
                f"q and c need {net.n} entries (one per queue), got {self.q.size} and {self.c.size}"
            )
        if self.v.shape != (net.m_u,):
            raise ConfigError(f"v needs {net.m_u} entries (one per route), got {self.v.size}")

    def with_horizon(self, horizon: float, *, zero_terminal: bool = False) -> CostSpec:
        c = np.zeros_like(self.c) if zero_terminal else self.c
        return CostSpec(q=self.q, v=self.v, c=c, horizon=horizon)


class CostateTrajectory(BaseModel):
    """Time-gridded solution y(t) of the backward costate equation.

    ``grid`` runs from 0 to the horizon and contains every refined switch
    time; ``ydot`` holds dy/dt from the right-hand side at each grid point.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    horizon: float
    grid: FloatArray
    y: FloatArray
    ydot: FloatArray
    switch_times: list[list[float]]
    active_at_start: list[bool]

    @property
    def y0(self) -> np.ndarray:
        return np.asarray(self.y[0])

    def _check_time(self, t: float) -> None:
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")

    def y_at(self, t: float) -> np.ndarray:
        self._check_time(t)
        return np.array([np.interp(t, self.grid, self.y[:, i]) for i in range(self.y.shape[1])])

    def ydot_at(self, t: float) -> np.ndarray:
        self._check_time(t)
        return np.array(
            [np.interp(t, self.grid, self.ydot[:, i]) for i in range(self.ydot.shape[1])]
        )

    def switching_function(self, net: QueueNetwork, costs: CostSpec, t: float) -> np.ndarray:
        """s(t) = R_D^T y(t) + v; control k is on where s_k < 0."""
        return net.route_matrix.T @ self.y_at(t) + costs.v


class IhSolution(BaseModel):
    """Stationary costate y with the active set of switched-on controls."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y: FloatArray
    active_set: list[int]
    degenerate: bool = False
    method: Literal["enumerate", "integrate"] = "enumerate"
