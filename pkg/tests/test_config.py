"""
Tests for the environment-driven application configuration.
"""

import importlib
import logging

import pytest

import src.config
from src.config import Config


def test_simulation_defaults() -> None:
    assert Config.N_MAX == 20
    assert Config.STEP == pytest.approx(1e-3)
    assert Config.WORKERS >= 1
    assert Config.RANGE_POLICY in ("warn", "error")
    assert Config.OUTPUT_DIR.is_absolute()
    assert isinstance(Config.LOG_LEVEL, int)


@pytest.mark.parametrize(
    "name, value",
    [
        ("LOG_LEVEL", "CHATTY"),
        ("KPO_N_MAX", "0"),
        ("KPO_STEP", "-1e-3"),
        ("KPO_RANGE_POLICY", "ignore"),
    ],
)
def test_invalid_environment_is_rejected(monkeypatch, name: str, value: str) -> None:
    monkeypatch.setenv(name, value)
    try:
        with pytest.raises(ValueError):
            importlib.reload(src.config)
    finally:
        monkeypatch.delenv(name)
        importlib.reload(src.config)


def test_log_level_from_environment(monkeypatch) -> None:
    monkeypatch.setenv("LOG_LEVEL", "debug")
    try:
        reloaded = importlib.reload(src.config)
        assert reloaded.Config.LOG_LEVEL == logging.DEBUG
    finally:
        monkeypatch.delenv("LOG_LEVEL")
        importlib.reload(src.config)
