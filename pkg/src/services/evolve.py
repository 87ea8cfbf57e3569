"""
Time Evolution Service.

Integrates i d/dt psi = H(t) psi with a fixed-step classic Runge-Kutta
scheme, and provides an independent midpoint-exponential propagator used as
a correctness oracle.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh

from src.config import Config
from src.exceptions import IntegrationDivergedError, InvalidDimensionError
from src.models.dynamics import SimResult, TimeDependentHamiltonian
from src.models.state import Operator, StateVector
from src.services.fock import parity_expectation, truncation_leakage
from src.services.hamiltonian import schedule_eval

logger = logging.getLogger(__name__)


def hamiltonian_at(H: TimeDependentHamiltonian, t: float) -> Operator:
    entries = H.base.entries.copy()
    for operator, schedule in H.terms:
        entries = entries + schedule_eval(schedule, t) * operator.entries
    return Operator(entries, H.dims)


def _prepare(H: TimeDependentHamiltonian, psi0: StateVector) -> np.ndarray:
    if psi0.dims != H.dims:
        raise InvalidDimensionError(
            f"Initial state dims {psi0.dims} != Hamiltonian dims {H.dims}."
        )
    norm = psi0.norm()
    if abs(norm - 1.0) > 1e-10:
        logger.warning("Initial state norm %.12f != 1; renormalizing.", norm)
        psi0 = psi0.normalized()
    return np.array(psi0.amplitudes, dtype=complex)


def integrate(
    H: TimeDependentHamiltonian,
    psi0: StateVector,
    step: float = Config.STEP,
    sample_every: int = 100,
    keep_states: bool = False,
    norm_limit: float = Config.NORM_DRIFT_LIMIT,
) -> SimResult:
    """
    Fixed-step RK4 over [0, T].

    The step is shrunk to T / ceil(T / step) so the grid ends exactly at T.
    Parity and truncation leakage are sampled every `sample_every` steps
    (and at both ends); states are kept only when `keep_states` is set.
    """
    if step <= 0:
        raise ValueError("step must be positive.")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1.")

    psi = _prepare(H, psi0)
    duration = H.duration
    n_steps = max(1, math.ceil(duration / step - 1e-9))
    dt = duration / n_steps

    base = H.base.entries
    operators = [operator.entries for operator, _ in H.terms]
    schedules = [schedule for _, schedule in H.terms]

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        out = base @ state
        for operator, schedule in zip(operators, schedules):
            coefficient = schedule_eval(schedule, t)
            if coefficient != 0.0:
                out = out + coefficient * (operator @ state)
        return -1j * out

    times: List[float] = []
    parity_trace: List[float] = []
    samples: Optional[List[Tuple[float, StateVector]]] = [] if keep_states else None

    def record(t: float, state: np.ndarray) -> float:
        snapshot = StateVector(state, H.dims)
        times.append(t)
        parity_trace.append(parity_expectation(snapshot))
        if samples is not None:
            samples.append((t, snapshot))
        return truncation_leakage(snapshot)

    logger.debug(
        "RK4: T=%.4g, %d steps of %.3e, dim=%d, %d scheduled terms",
        duration,
        n_steps,
        dt,
        base.shape[0],
        len(operators),
    )

    leakage = record(0.0, psi)
    for k in range(n_steps):
        t0 = duration * k / n_steps
        t_mid = duration * (k + 0.5) / n_steps
        t1 = duration * (k + 1) / n_steps

        k1 = rhs(t0, psi)
        k2 = rhs(t_mid, psi + 0.5 * dt * k1)
        k3 = rhs(t_mid, psi + 0.5 * dt * k2)
        k4 = rhs(t1, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        if (k + 1) % sample_every == 0 or k + 1 == n_steps:
            leakage = max(leakage, record(t1, psi))

    norm = float(np.linalg.norm(psi))
    norm_drift = abs(norm - 1.0)
    if not np.isfinite(norm) or norm_drift > norm_limit:
        raise IntegrationDivergedError(
            f"Norm drift {norm_drift:.3e} exceeds {norm_limit:.1e} with step "
            f"{dt:.3e}; retry with a smaller step."
        )

    return SimResult(
        final_state=StateVector(psi / norm, H.dims),
        norm_drift=norm_drift,
        leakage=leakage,
        steps=n_steps,
        times=tuple(times),
        parity_trace=tuple(parity_trace),
        samples=samples,
    )


def propagate_reference(
    H: TimeDependentHamiltonian, psi0: StateVector, n_slices: int
) -> StateVector:
    """
    Piecewise-constant propagator: exp(-i H(t_mid) dt) per slice, applied
    through a Hermitian eigendecomposition. Second order in dt.
    """
    if n_slices < 1:
        raise ValueError("n_slices must be >= 1.")
    psi = _prepare(H, psi0)

    if not H.terms:
        values, vectors = eigh(H.base.entries)
        psi = vectors @ (np.exp(-1j * values * H.duration) * (vectors.conj().T @ psi))
        return StateVector(psi, H.dims)

    dt = H.duration / n_slices
    for j in range(n_slices):
        values, vectors = eigh(hamiltonian_at(H, (j + 0.5) * dt).entries)
        psi = vectors @ (np.exp(-1j * values * dt) * (vectors.conj().T @ psi))
    return StateVector(psi, H.dims)
