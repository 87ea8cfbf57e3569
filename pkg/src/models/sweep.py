"""
Sweep configuration and tabular sweep results.

A SweepConfig is stored on disk as flat key=value text (one parameter per
line) so that configurations diff cleanly; parsing goes through dotenv.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic import model_validator

from src.exceptions import ConfigError
from src.models.params import KpoParams
from src.models.state import WignerMap

logger = logging.getLogger(__name__)


class ExperimentKind(str, Enum):
    RZ_SWEEP = "rz_sweep"
    RX_SWEEP = "rx_sweep"
    ZZ_SWEEP = "zz_sweep"
    INIT_CHECK = "init_check"
    SPECTRUM_SWEEP = "spectrum_sweep"


# Default grid and gate time per experiment
_DEFAULTS: Dict[ExperimentKind, Dict[str, Any]] = {
    ExperimentKind.RZ_SWEEP: {
        "grid_start": -math.pi,
        "grid_stop": math.pi,
        "grid_count": 41,
        "gate_time": 2.0,
    },
    ExperimentKind.RX_SWEEP: {
        "grid_start": 0.0,
        "grid_stop": 2.5,
        "grid_count": 26,
        "gate_time": 10.0,
    },
    ExperimentKind.ZZ_SWEEP: {
        "grid_start": 0.0,
        "grid_stop": math.pi,
        "grid_count": 33,
        "gate_time": 2.0,
    },
    ExperimentKind.INIT_CHECK: {
        "grid_start": 5.0,
        "grid_stop": 100.0,
        "grid_count": 5,
        "grid_values": (5.0, 10.0, 20.0, 50.0, 100.0),
        "gate_time": 2.0,
    },
    ExperimentKind.SPECTRUM_SWEEP: {
        "grid_start": 0.0,
        "grid_stop": 4.0,
        "grid_count": 41,
        "gate_time": 2.0,
    },
}


class SweepConfig(BaseModel):
    """Validated parameters of one sweep run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: ExperimentKind
    grid_start: float
    grid_stop: float
    grid_count: int = Field(ge=2)
    grid_values: Optional[Tuple[float, ...]] = None
    pump: float = Field(default=4.0, gt=0.0)
    gate_time: float = Field(default=2.0, gt=0.0)
    n_max: int = Field(default=20, ge=1)
    step: float = Field(default=1e-3, gt=0.0)
    sample_every: int = Field(default=100, ge=1)
    workers: int = Field(default=1, ge=1)
    output: Optional[str] = None
    wigner_output: Optional[str] = None
    wigner_extent: float = Field(default=6.0, gt=0.0)
    wigner_resolution: int = Field(default=121, ge=2)
    range_policy: Literal["warn", "error"] = "warn"

    @field_validator("grid_values", mode="before")
    @classmethod
    def _split_grid_values(cls, value: Any) -> Any:
        if isinstance(value, str):
            parts = [item.strip() for item in value.split(",") if item.strip()]
            return tuple(float(item) for item in parts) or None
        return value

    @field_validator("output", "wigner_output", mode="before")
    @classmethod
    def _empty_to_none(cls, value: Any) -> Any:
        if value == "":
            return None
        if isinstance(value, Path):
            return str(value)
        return value

    @model_validator(mode="after")
    def _check_grid(self) -> SweepConfig:
        if self.grid_values is not None and len(self.grid_values) < 2:
            raise ValueError("grid_values needs at least two entries")
        if self.experiment is ExperimentKind.INIT_CHECK and min(self.grid()) <= 0:
            raise ValueError("initialization times must be positive")
        return self

    @classmethod
    def defaults_for(cls, experiment: ExperimentKind, **overrides: Any) -> SweepConfig:
        """Build the default configuration of an experiment, with optional overrides."""
        values: Dict[str, Any] = {"experiment": experiment, **_DEFAULTS[experiment]}
        given = {k: v for k, v in overrides.items() if v is not None}
        values.update(given)
        # An explicit linear grid replaces any default explicit value list
        linear_keys = {"grid_start", "grid_stop", "grid_count"}
        if linear_keys & given.keys() and "grid_values" not in given:
            values["grid_values"] = None
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            raise ConfigError(f"Invalid sweep configuration: {e}") from e

    @classmethod
    def from_text(cls, text: str) -> SweepConfig:
        raw = dotenv_values(stream=io.StringIO(text))
        values = {key.lower(): value for key, value in raw.items()}
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            raise ConfigError(f"Invalid sweep configuration: {e}") from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> SweepConfig:
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigError(f"Config file not found: {file_path}")
        logger.debug("Loading sweep configuration from %s", file_path)
        return cls.from_text(file_path.read_text(encoding="utf-8"))

    def to_text(self) -> str:
        """Serialize to key=value lines; from_text(to_text()) == self."""
        lines: List[str] = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            if value is None:
                text = ""
            elif isinstance(value, Enum):
                text = str(value.value)
            elif isinstance(value, tuple):
                text = ",".join(repr(float(v)) for v in value)
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{name}={text}")
        return "\n".join(lines) + "\n"

    def with_overrides(self, **overrides: Any) -> SweepConfig:
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return SweepConfig.model_validate(values)
        except ValidationError as e:
            raise ConfigError(f"Invalid sweep override: {e}") from e

    def grid(self) -> Tuple[float, ...]:
        if self.grid_values is not None:
            return tuple(self.grid_values)
        values = np.linspace(self.grid_start, self.grid_stop, self.grid_count)
        return tuple(float(v) for v in values)

    def kpo_params(self) -> KpoParams:
        return KpoParams(pump=self.pump, n_max=self.n_max)


Cell = Union[float, str]


@dataclass(frozen=True)
class SweepTable:
    """Ordered sweep rows plus the metadata written into the CSV header."""

    experiment: ExperimentKind
    columns: Tuple[str, ...]
    rows: List[Tuple[Cell, ...]]
    metadata: Dict[str, str] = field(default_factory=dict)
    wigner: Optional[WignerMap] = None

    def column(self, name: str) -> List[Cell]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]
