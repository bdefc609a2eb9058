"""Tests for configuration loading."""

import json
import tempfile
from pathlib import Path

import pytest
import yaml

from qnetopt.config.loader import load_config, save_config
from qnetopt.config.models import RunConfig


def test_load_yaml_config():
    data = {
        "costs": {"q": [2.5, 1.0], "v": [1.0], "T": 5.0},
    }
    with tempfile.NamedTemporaryFile(suffix=".yaml", mode="w", delete=False) as f:
        yaml.dump(data, f)
        f.flush()
        cfg = load_config(f.name)
    assert cfg.costs.q == [2.5, 1.0]
    assert cfg.costs.horizon == 5.0


def test_load_json_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"simulation": {"x0": [50, 0], "trials": 20, "seed": 3}}))
    cfg = load_config(path)
    assert cfg.simulation.x0 == [50, 0]
    assert cfg.simulation.trials == 20
    assert cfg.simulation.seed == 3


def test_load_without_path_gives_defaults():
    assert load_config() == RunConfig()


def test_empty_yaml_gives_defaults(tmp_path):
    path = tmp_path / "empty.yml"
    path.write_text("")
    assert load_config(path) == RunConfig()


def test_load_nonexistent_config():
    with pytest.raises(FileNotFoundError):
        load_config("/nonexistent/config.yaml")


def test_unsupported_suffix(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[costs]\n")
    with pytest.raises(ValueError, match="Unsupported config format"):
        load_config(path)


def test_network_path_is_relative_to_config(tmp_path):
    sub = tmp_path / "configs"
    sub.mkdir()
    path = sub / "run.yaml"
    path.write_text("network: nets/chain.json\n")
    cfg = load_config(path)
    assert Path(cfg.network) == sub / "nets" / "chain.json"


def test_absolute_network_path_is_kept(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(f"network: {tmp_path / 'chain.json'}\n")
    assert load_config(path).network == str(tmp_path / "chain.json")


def test_save_and_reload(tmp_path):
    cfg = RunConfig.model_validate({
        "costs": {"q": [1.0], "v": [], "T": 2.0},
        "oracle": {"n_override": 4},
        "output": {"format": "json"},
    })
    path = tmp_path / "nested" / "saved.yaml"
    save_config(cfg, path)
    assert load_config(path) == cfg
