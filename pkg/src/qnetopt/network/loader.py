"""Network description loading."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import yaml

from qnetopt.network.model import NetworkDescription, QueueNetwork, build_network

logger = logging.getLogger(__name__)


def load_network(path: Path | str) -> QueueNetwork:
    """Load and build a network from a JSON or YAML description file."""
    network_path = Path(path)
    if not network_path.exists():
        raise FileNotFoundError(f"Network file not found: {network_path}")
    raw = network_path.read_text(encoding="utf-8")

    if network_path.suffix in (".yaml", ".yml"):
        data = yaml.safe_load(raw) or {}
    elif network_path.suffix == ".json":
        data = json.loads(raw)
    else:
        raise ValueError(f"Unsupported network format: {network_path.suffix}")

    logger.info("Loading network from %s", network_path)
    return build_network(NetworkDescription.model_validate(data))


def save_network(net: QueueNetwork, path: Path | str) -> None:
    """Write a network back out in the description format (JSON)."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    data = net.to_description().model_dump(by_alias=True)
    target.write_text(json.dumps(data, indent=2), encoding="utf-8")
