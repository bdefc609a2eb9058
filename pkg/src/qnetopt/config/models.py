"""Run configuration data models for qnetopt."""

from __future__ import annotations

from typing import Literal

from pydantic import AliasChoices, BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from qnetopt.costate.models import CostSpec
from qnetopt.errors import ConfigError
from qnetopt.network.model import QueueNetwork


class CostsConfig(BaseModel):
    model_config = {"populate_by_name": True}

    q: list[float] = Field(default_factory=list)
    v: list[float] = Field(default_factory=list)
    c: list[float] | None = None  # None means zero terminal cost
    horizon: float = Field(default=10.0, gt=0, validation_alias=AliasChoices("horizon", "T"))

    def to_spec(self, net: QueueNetwork) -> CostSpec:
        c = self.c if self.c is not None else [0.0] * net.n
        try:
            spec = CostSpec(q=self.q, v=self.v, c=c, horizon=self.horizon)
        except ValueError as exc:
            raise ConfigError(f"Invalid costs block: {exc}") from exc
        spec.check_against(net)
        return spec


class SolverConfig(BaseModel):
    dt: float | None = Field(default=None, gt=0)
    switch_tol: float | None = Field(default=None, gt=0)
    ih_method: Literal["enumerate", "integrate"] = "enumerate"


class SimulationConfig(BaseModel):
    x0: list[int] = Field(default_factory=list)
    trials: int = Field(default=1000, ge=1)
    seed: int | None = None
    workers: int = Field(default=1, ge=1)
    trajectories: int = Field(default=1, ge=0)  # sample paths dumped as CSV

    @field_validator("x0")
    @classmethod
    def _non_negative(cls, value: list[int]) -> list[int]:
        if any(v < 0 for v in value):
            raise ValueError("x0 entries must be non-negative")
        return value


class OracleConfig(BaseModel):
    n_override: int | None = Field(default=None, ge=0)
    steps: int = Field(default=10_000, ge=1)
    tol: float = Field(default=1e-8, gt=0)
    max_states: int = Field(default=200_000, ge=1)
    kolmogorov_dt: float | None = Field(default=None, gt=0)
    hjb_samples: int = Field(default=100, ge=1)
    hjb_max_units: int = Field(default=20, ge=0)
    rel_tolerance: float = Field(default=0.01, gt=0)


class OutputConfig(BaseModel):
    out_dir: str = "qnetopt-out"
    format: Literal["text", "json"] = "text"


class RunConfig(BaseModel):
    """Root run configuration: which network, what it costs, how to solve and check it."""

    network: str | None = None
    costs: CostsConfig = Field(default_factory=CostsConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)


class EnvSettings(BaseSettings):
    """Defaults read from ``QNETOPT_*`` environment variables."""

    model_config = SettingsConfigDict(env_prefix="QNETOPT_")

    seed: int = 0
