"""
Configuration settings for the KPO simulator.

This module loads environment variables and defines the Config class
used by the CLI factory, the sweep runner and the test suite.
"""

import os
import logging
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()


class Config:
    """
    Base configuration class.
    """

    # Logging
    _level_name = os.environ.get("LOG_LEVEL", "INFO").upper()
    _level = logging.getLevelName(_level_name)

    if not isinstance(_level, int):
        raise ValueError(f"Unknown LOG_LEVEL '{_level_name}'.")

    LOG_LEVEL: int = _level
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Simulation defaults (units: hbar = K = 1)
    N_MAX: int = int(os.environ.get("KPO_N_MAX", "20"))
    STEP: float = float(os.environ.get("KPO_STEP", "1e-3"))
    WORKERS: int = int(os.environ.get("KPO_WORKERS", "1"))

    if N_MAX < 1:
        raise ValueError("KPO_N_MAX must be at least 1.")
    if STEP <= 0:
        raise ValueError("KPO_STEP must be positive.")
    if WORKERS < 1:
        raise ValueError("KPO_WORKERS must be at least 1.")

    # Sweep range policy: 'warn' logs out-of-range grids, 'error' rejects them
    RANGE_POLICY: str = os.environ.get("KPO_RANGE_POLICY", "warn").lower()

    if RANGE_POLICY not in ("warn", "error"):
        raise ValueError("KPO_RANGE_POLICY must be 'warn' or 'error'.")

    # Output - Absolute Path Logic
    BASE_DIR: Path = Path(__file__).resolve().parent.parent
    OUTPUT_DIR: Path = BASE_DIR / os.environ.get("KPO_OUTPUT_DIR", "exports")

    # Diagnostics thresholds
    TRUNCATION_THRESHOLD: float = 1e-6
    GATE_LEAKAGE_WARNING: float = 1e-3
    NORM_DRIFT_LIMIT: float = 1e-6
