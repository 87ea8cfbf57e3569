"""
Physical parameter models: oscillator parameters and pulse schedules.

All quantities are expressed in units where hbar = 1; rates in units of the
Kerr coefficient K and times in 1/K.
"""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class ScheduleKind(str, Enum):
    """Supported envelope shapes."""

    CONSTANT = "constant"
    LINEAR_RAMP = "linear_ramp"
    SINE = "sine"
    SINE_SQUARED = "sine_squared"


class PulseSchedule(BaseModel):
    """Scalar envelope of time driving E(t), Delta(t), g(t) or p(t)."""

    model_config = ConfigDict(frozen=True)

    kind: ScheduleKind
    amplitude: float
    duration: float = Field(gt=0.0)
    offset: float = 0.0


class KpoParams(BaseModel):
    """Parameters of a single Kerr parametric oscillator."""

    model_config = ConfigDict(frozen=True)

    kerr: float = Field(default=1.0, gt=0.0)
    pump: float = Field(default=4.0, ge=0.0)
    detuning: float = Field(default=0.0, ge=0.0)
    n_max: int = Field(default=20, ge=1)

    @property
    def alpha0(self) -> float:
        """Coherent amplitude sqrt(p/K) of the computational states."""
        return math.sqrt(self.pump / self.kerr)

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def with_pump(self, pump: float) -> KpoParams:
        return KpoParams.model_validate({**self.model_dump(), "pump": pump})

    def with_detuning(self, detuning: float) -> KpoParams:
        return KpoParams.model_validate({**self.model_dump(), "detuning": detuning})
