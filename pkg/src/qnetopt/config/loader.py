"""Run configuration loading for qnetopt."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import yaml

from qnetopt.config.models import RunConfig

logger = logging.getLogger(__name__)


def load_config(path: Path | str | None = None) -> RunConfig:
    """Load a run configuration from a YAML or JSON file.

    Without a path the defaults apply; every field can then be supplied by
    command-line flags.
    """
    if path is None:
        logger.info("No run config given, using defaults")
        return RunConfig()

    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")
    raw = config_path.read_text(encoding="utf-8")

    if config_path.suffix in (".yaml", ".yml"):
        data = yaml.safe_load(raw) or {}
    elif config_path.suffix == ".json":
        data = json.loads(raw)
    else:
        raise ValueError(f"Unsupported config format: {config_path.suffix}")

    config = RunConfig.model_validate(data)
    if config.network is not None and not Path(config.network).is_absolute():
        # network paths in a config file are relative to that file
        config = config.model_copy(
            update={"network": str(config_path.parent / config.network)}
        )
    logger.info("Loaded run config from %s", config_path)
    return config


def save_config(config: RunConfig, path: Path) -> None:
    """Save a run configuration to a YAML file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = config.model_dump(exclude_defaults=True, by_alias=False)
    path.write_text(yaml.dump(data, default_flow_style=False), encoding="utf-8")
    logger.info("Config saved to %s", path)
