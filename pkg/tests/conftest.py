"""
Global Pytest Configuration and Fixtures.

This module defines the fixtures required for testing the simulator: the
test configuration, the click application and its runner, default KPO
parameters with their qubit basis, and a helper that writes sweep config
files.
"""

from pathlib import Path
from typing import Callable

import click
import pytest
from click.testing import CliRunner

from src import create_cli
from src.config import Config
from src.models.dynamics import QubitBasis
from src.models.params import KpoParams
from src.services.gates import qubit_basis


class TestConfig(Config):
    """
    Configuration overrides for testing.
    """

    OUTPUT_DIR = Path(__file__).resolve().parent / "_exports"
    RANGE_POLICY = "warn"


@pytest.fixture
def cli() -> click.Group:
    """
    Create a fresh click application wired to the test configuration.

    Returns:
        click.Group: The configured command group.
    """
    return create_cli(TestConfig)


@pytest.fixture
def runner() -> CliRunner:
    """A runner to simulate command-line invocations."""
    return CliRunner()


@pytest.fixture
def params() -> KpoParams:
    """p0 = 4K, Delta = 0, n_max = 20."""
    return KpoParams()


@pytest.fixture
def basis(params: KpoParams) -> QubitBasis:
    return qubit_basis(params)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[str], Path]:
    """
    Provides a helper that stores key=value sweep configuration text.

    Returns:
        callable: A function that takes the config text and returns its path.
    """

    def _write(text: str, name: str = "sweep.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
