"""
Models describing a simulated evolution: the Hamiltonian, the protocol that
generated it, and the result of integrating it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.exceptions import InvalidDimensionError
from src.models.params import KpoParams, PulseSchedule
from src.models.state import Operator, StateVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """H(t) = base + sum_i s_i(t) * O_i on [0, duration]."""

    base: Operator
    terms: Tuple[Tuple[Operator, PulseSchedule], ...]
    duration: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.duration <= 0:
            raise ValueError("Hamiltonian duration must be positive.")
        if not self.base.is_hermitian():
            raise ValueError("Base Hamiltonian is not Hermitian.")
        for operator, schedule in self.terms:
            if operator.dims != self.base.dims:
                raise InvalidDimensionError(
                    f"Term dims {operator.dims} != base dims {self.base.dims}."
                )
            if not operator.is_hermitian():
                raise ValueError("Scheduled Hamiltonian term is not Hermitian.")
            if schedule.duration < self.duration * (1.0 - 1e-12):
                raise ValueError(
                    f"Schedule duration {schedule.duration} shorter than "
                    f"Hamiltonian duration {self.duration}."
                )

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.base.dims


@dataclass(frozen=True)
class SimResult:
    """Final state of an integration plus its diagnostics."""

    final_state: StateVector
    norm_drift: float
    leakage: float
    steps: int
    times: Tuple[float, ...] = ()
    parity_trace: Tuple[float, ...] = ()
    samples: Optional[List[Tuple[float, StateVector]]] = field(
        default=None, repr=False
    )
    fidelity: Optional[float] = None


class GateKind(str, Enum):
    INIT = "init"
    RZ = "rz"
    RX = "rx"
    ZZ = "zz"


class GateProtocol(BaseModel):
    """
    Everything needed to simulate one gate.

    `angle` is phi (rz), Delta_0 in units of K (rx), Theta (zz) or unused (init).
    """

    model_config = ConfigDict(frozen=True)

    kind: GateKind
    angle: float
    gate_time: float = Field(gt=0.0)
    params: Tuple[KpoParams, ...]
    schedule: PulseSchedule


@dataclass(frozen=True)
class QubitBasis:
    """
    Orthonormal cat pair of one oscillator and the computational states
    derived from it: |0> = (|C+> + |C->)/sqrt(2), |1> = (|C+> - |C->)/sqrt(2).
    """

    alpha0: float
    cat_even: StateVector
    cat_odd: StateVector
    zero: StateVector
    one: StateVector

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.cat_even.dims
