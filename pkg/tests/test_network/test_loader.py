"""Tests for network description files."""

import json

import numpy as np
import pytest
import yaml

from qnetopt.network import load_network, save_network


def _description():
    return {
        "queues": [{"name": "X1", "exit_rate": 1.0}, {"name": "X2", "exit_rate": 1.0}],
        "routes": [{"from": "X1", "to": "X2"}],
        "u_max": 1.0,
    }


def test_load_json_network(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(json.dumps(_description()), encoding="utf-8")
    net = load_network(path)
    assert net.queue_names == ("X1", "X2")
    np.testing.assert_array_equal(net.route_matrix, [[-1], [1]])


def test_load_yaml_network(tmp_path):
    path = tmp_path / "net.yaml"
    path.write_text(yaml.dump(_description()), encoding="utf-8")
    net = load_network(str(path))
    assert net.m_u == 1
    assert net.u_max == 1.0


def test_load_yaml_with_numeric_queue_names(tmp_path):
    path = tmp_path / "net.yaml"
    path.write_text(
        "queues:\n"
        "  - {name: 1, exit_rate: 1.0}\n"
        "  - {name: 0, exit_rate: 1.0}\n"
        "routes:\n"
        "  - {from: 0, to: 1}\n",
        encoding="utf-8",
    )
    net = load_network(path)
    assert net.queue_names == ("1", "0")
    np.testing.assert_array_equal(net.route_matrix, [[1], [-1]])


def test_load_missing_network():
    with pytest.raises(FileNotFoundError):
        load_network("/nonexistent/net.json")


def test_load_unsupported_suffix(tmp_path):
    path = tmp_path / "net.toml"
    path.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="Unsupported"):
        load_network(path)


def test_save_then_load(tmp_path, fork):
    path = tmp_path / "fork.json"
    save_network(fork, path)
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["routes"][0] == {"from": "X1", "to": "X2"}
    reloaded = load_network(path)
    np.testing.assert_array_equal(reloaded.route_matrix, fork.route_matrix)
    np.testing.assert_array_equal(reloaded.gammas, fork.gammas)
