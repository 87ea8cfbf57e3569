"""
Hamiltonian Service.

Builds the KPO Hamiltonian, the drive and coupling terms, and evaluates the
pulse schedules that modulate them. Stateless: gate drivers own the
composition of a base Hamiltonian with its scheduled terms.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import eigh

from src.exceptions import ScheduleRangeError
from src.models.params import KpoParams, PulseSchedule, ScheduleKind
from src.models.state import Operator
from src.services.fock import annihilation_operator, embed, tensor, identity_operator

logger = logging.getLogger(__name__)


def kpo_hamiltonian(params: KpoParams) -> Operator:
    """H1 = Delta a†a + (K/2) a†^2 a^2 - (p/2)(a†^2 + a^2)."""
    a = annihilation_operator(params.n_max).entries
    a_dag = a.conj().T
    entries = (
        params.detuning * (a_dag @ a)
        + 0.5 * params.kerr * (a_dag @ a_dag @ a @ a)
        - 0.5 * params.pump * (a_dag @ a_dag + a @ a)
    )
    return Operator(entries, (params.dim,))


def squeezing_term(n_max: int) -> Operator:
    """-(a†^2 + a^2)/2, the pump term per unit p."""
    a = annihilation_operator(n_max).entries
    return Operator(-0.5 * (a.conj().T @ a.conj().T + a @ a), (n_max + 1,))


def drive_hamiltonian(E: float, n_max: int) -> Operator:
    """H_z = E (a + a†)."""
    a = annihilation_operator(n_max)
    return (a + a.dagger()) * E


def coupling_hamiltonian(g: float, n1: int, n2: int) -> Operator:
    """H_U = g (a1 a2† + a1† a2) on the joint space, oscillator 1 slow."""
    dims = (n1 + 1, n2 + 1)
    a1 = embed(annihilation_operator(n1), 0, dims)
    a2 = embed(annihilation_operator(n2), 1, dims)
    return (a1 @ a2.dagger() + a1.dagger() @ a2) * g


def joint_kpo_hamiltonian(first: KpoParams, second: KpoParams) -> Operator:
    """H1 ⊗ I + I ⊗ H1 for two uncoupled oscillators."""
    h1 = kpo_hamiltonian(first)
    h2 = kpo_hamiltonian(second)
    return tensor(h1, identity_operator(h2.dims)) + tensor(
        identity_operator(h1.dims), h2
    )


def schedule_eval(s: PulseSchedule, t: float) -> float:
    """Evaluate the envelope at time t in [0, T]."""
    tolerance = 1e-12 * max(1.0, s.duration)
    if t < -tolerance or t > s.duration + tolerance:
        raise ScheduleRangeError(
            f"t={t} outside schedule window [0, {s.duration}] ({s.kind.value})."
        )
    t = min(max(t, 0.0), s.duration)

    if s.kind is ScheduleKind.CONSTANT:
        value = s.amplitude
    elif s.kind is ScheduleKind.LINEAR_RAMP:
        value = s.amplitude * t / s.duration
    elif s.kind is ScheduleKind.SINE:
        value = s.amplitude * math.sin(math.pi * t / s.duration)
    else:
        value = s.amplitude * math.sin(math.pi * t / s.duration) ** 2
    return s.offset + value


def schedule_integral(
    s: PulseSchedule, n_panels: int = 1000, upper: Union[float, None] = None
) -> float:
    """Simpson quadrature of the schedule over [0, upper or T]."""
    end = s.duration if upper is None else upper
    times = np.linspace(0.0, end, n_panels + 1)
    values = np.array([schedule_eval(s, float(t)) for t in times])
    return float(simpson(values, x=times))


def ramp_schedule(kind: ScheduleKind, target: float, duration: float) -> PulseSchedule:
    """
    Monotone 0 -> target ramp over `duration`.

    The periodic shapes vanish at both ends of their window, so they are
    built with a 2*duration window and only the rising half is used.
    """
    if kind in (ScheduleKind.SINE, ScheduleKind.SINE_SQUARED):
        return PulseSchedule(kind=kind, amplitude=target, duration=2.0 * duration)
    if kind is ScheduleKind.LINEAR_RAMP:
        return PulseSchedule(kind=kind, amplitude=target, duration=duration)
    return PulseSchedule(
        kind=ScheduleKind.CONSTANT, amplitude=target, duration=duration
    )


@dataclass(frozen=True)
class ParitySpectrum:
    """Lowest eigenvalues of H1 in the even and odd parity sectors."""

    even: Tuple[float, ...]
    odd: Tuple[float, ...]

    @property
    def even_gap(self) -> float:
        return self.even[1] - self.even[0]

    @property
    def parity_splitting(self) -> float:
        return self.odd[0] - self.even[0]


def instantaneous_spectrum(params: KpoParams, levels: int = 4) -> ParitySpectrum:
    """
    Diagonalize H1 block by block; H1 commutes with parity so the even and
    odd Fock sectors decouple.
    """
    entries = kpo_hamiltonian(params).entries
    sectors = []
    for start in (0, 1):
        index = np.arange(start, params.dim, 2)
        block = entries[np.ix_(index, index)]
        count = min(levels, len(index))
        values = eigh(block, eigvals_only=True, subset_by_index=[0, count - 1])
        sectors.append(tuple(float(v) for v in values))
    logger.debug("Spectrum at p=%.4g: even=%s odd=%s", params.pump, *sectors)
    return ParitySpectrum(even=sectors[0], odd=sectors[1])
