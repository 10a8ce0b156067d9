"""Tests for the YAML configuration layer."""

import pytest
import yaml
from pydantic import ValidationError

from dcsd.core.config_manager import CLIConfig, ConfigManager
from dcsd.core.equivalence import DEFAULT_NODE_BUDGET
from dcsd.core.weights import DEFAULT_WORK_BUDGET, EngineSettings


def test_defaults_are_written_on_first_use(isolated_config):
    manager = ConfigManager()
    assert manager.config_path == isolated_config / ".dcsd" / "config.yml"
    assert manager.config_path.exists()
    saved = yaml.safe_load(manager.config_path.read_text())
    assert saved["engine"]["work_budget"] == DEFAULT_WORK_BUDGET
    assert manager.node_budget == DEFAULT_NODE_BUDGET


def test_engine_settings_mirror_the_config(tmp_path):
    manager = ConfigManager(config_path=tmp_path / "c.yml")
    assert manager.engine_settings() == EngineSettings()
    assert manager.engine_settings(workers=3, seed=None).workers == 3


def test_set_get_and_remove(tmp_path):
    path = tmp_path / "c.yml"
    manager = ConfigManager(config_path=path)
    manager.set("engine.workers", "4")
    assert manager.get("engine.workers") == 4
    assert ConfigManager(config_path=path).config.engine.workers == 4

    manager.remove("engine.workers")
    assert manager.get("engine.workers") == 1
    assert manager.get("engine.nothing", "fallback") == "fallback"


def test_invalid_values_are_refused(tmp_path):
    manager = ConfigManager(config_path=tmp_path / "c.yml")
    with pytest.raises(ValidationError):
        manager.set("engine.workers", "0")
    with pytest.raises(ValidationError):
        manager.set("engine.colour", "blue")
    with pytest.raises(KeyError):
        manager.remove("engine.colour")


def test_environment_overrides(tmp_path, monkeypatch):
    path = tmp_path / "c.yml"
    ConfigManager(config_path=path).set("engine.workers", 2)
    monkeypatch.setenv("DCSD_WORKERS", "6")
    monkeypatch.setenv("DCSD_WORK_BUDGET", "0x1000")
    monkeypatch.setenv("DCSD_NODE_BUDGET", "500")
    monkeypatch.setenv("DCSD_VERBOSE", "yes")
    manager = ConfigManager(config_path=path)
    assert manager.config.engine.workers == 6
    assert manager.config.engine.work_budget == 4096
    assert manager.node_budget == 500
    assert manager.config.verbose is True


def test_environment_overrides_apply_to_a_new_file(tmp_path, monkeypatch):
    monkeypatch.setenv("DCSD_SEED", "17")
    manager = ConfigManager(config_path=tmp_path / "fresh.yml")
    assert manager.engine_settings().seed == 17


def test_corrupt_file_falls_back_to_defaults(tmp_path):
    path = tmp_path / "c.yml"
    path.write_text("engine:\n  workers: many\n")
    manager = ConfigManager(config_path=path)
    assert manager.config == CLIConfig()


def test_debug_mode(tmp_path, monkeypatch):
    manager = ConfigManager(config_path=tmp_path / "c.yml")
    assert not manager.is_debug_mode()
    monkeypatch.setenv("DCSD_DEBUG", "1")
    assert manager.is_debug_mode()


def test_reset_to_defaults(tmp_path):
    manager = ConfigManager(config_path=tmp_path / "c.yml")
    manager.set("equivalence.node_budget", 10)
    manager.reset_to_defaults()
    assert manager.node_budget == DEFAULT_NODE_BUDGET
