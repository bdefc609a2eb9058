"""Run configuration for qnetopt."""

from qnetopt.config.loader import load_config, save_config
from qnetopt.config.models import (
    CostsConfig,
    EnvSettings,
    OracleConfig,
    OutputConfig,
    RunConfig,
    SimulationConfig,
    SolverConfig,
)

__all__ = [
    "CostsConfig",
    "EnvSettings",
    "OracleConfig",
    "OutputConfig",
    "RunConfig",
    "SimulationConfig",
    "SolverConfig",
    "load_config",
    "save_config",
]
