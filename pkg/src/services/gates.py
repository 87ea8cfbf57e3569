"""
Gate Protocol Service.

Implements adiabatic initialization, R_z(phi), R_x(theta) and the ZZ gate
U(Theta) on KPO qubits, the ideal gate matrices they approximate, and the
projection of oscillator states onto the cat-state qubit subspace.
"""

import dataclasses
import logging
import math
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from src.config import Config
from src.exceptions import (
    InvalidDimensionError,
    UnidentifiableAngleError,
    UnknownGateError,
)
from src.models.dynamics import (
    GateKind,
    GateProtocol,
    QubitBasis,
    SimResult,
    TimeDependentHamiltonian,
)
from src.models.params import KpoParams, PulseSchedule, ScheduleKind
from src.models.state import Operator, StateVector
from src.services.evolve import integrate
from src.services.fock import (
    CatParity,
    cat_state,
    fidelity,
    fock_state,
    number_operator,
)
from src.services.hamiltonian import (
    coupling_hamiltonian,
    drive_hamiltonian,
    joint_kpo_hamiltonian,
    kpo_hamiltonian,
    ramp_schedule,
    schedule_eval,
    schedule_integral,
    squeezing_term,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# Golden-section tolerance is relative; shifting theta away from 0 keeps it
# meaningful for rotations near the identity.
_SEARCH_OFFSET = 2.0 * TWO_PI
# Largest allowed gap between the phase-ratio and searched angles
THETA_AGREEMENT = 1e-4

Bases = Union[QubitBasis, Sequence[QubitBasis]]
ParamsArg = Union[KpoParams, Sequence[KpoParams]]


class QubitProjection(NamedTuple):
    amplitudes: np.ndarray
    leakage: float


class ThetaEstimate(NamedTuple):
    """Phase-ratio angle and its fidelity; `searched` is the search result."""

    theta: float
    fidelity: float
    searched: float

    @property
    def disagreement(self) -> float:
        return abs((self.searched - self.theta + math.pi) % TWO_PI - math.pi)

    @property
    def agrees(self) -> bool:
        return self.disagreement <= THETA_AGREEMENT


def _gate_kind(kind: Union[GateKind, str]) -> GateKind:
    try:
        return GateKind(kind)
    except ValueError as e:
        raise UnknownGateError(f"Unknown gate kind '{kind}'.") from e


def ideal_gate(kind: Union[GateKind, str], angle: float) -> Operator:
    """R_z(phi), R_x(theta) or U(Theta) on the abstract qubit space."""
    gate = _gate_kind(kind)
    half = angle / 2.0
    if gate is GateKind.RZ:
        return Operator(np.diag([np.exp(-1j * half), np.exp(1j * half)]), (2,))
    if gate is GateKind.RX:
        c, s = math.cos(half), math.sin(half)
        return Operator(np.array([[c, -1j * s], [-1j * s, c]]), (2,))
    if gate is GateKind.ZZ:
        minus, plus = np.exp(-1j * half), np.exp(1j * half)
        return Operator(np.diag([minus, plus, plus, minus]), (2, 2))
    raise UnknownGateError(f"No ideal unitary for gate kind '{gate.value}'.")


@lru_cache(maxsize=32)
def qubit_basis(params: KpoParams) -> QubitBasis:
    """Cat pair at alpha0 = sqrt(p/K) and the computational states it spans."""
    alpha0 = params.alpha0
    even = cat_state(alpha0, CatParity.EVEN, params.n_max)
    odd = cat_state(alpha0, CatParity.ODD, params.n_max)
    root = 1.0 / math.sqrt(2.0)
    return QubitBasis(
        alpha0=alpha0,
        cat_even=even,
        cat_odd=odd,
        zero=(even + odd).scaled(root),
        one=(even - odd).scaled(root),
    )


def _as_tuple(bases: Bases, count: int) -> Tuple[QubitBasis, ...]:
    if isinstance(bases, QubitBasis):
        return (bases,) * count
    bases = tuple(bases)
    if len(bases) != count:
        raise InvalidDimensionError(f"Need {count} qubit bases, got {len(bases)}.")
    return bases


def _params_tuple(params: ParamsArg) -> Tuple[KpoParams, ...]:
    return (params,) if isinstance(params, KpoParams) else tuple(params)


def _computational_matrix(basis: QubitBasis) -> np.ndarray:
    return np.vstack([basis.zero.amplitudes, basis.one.amplitudes])


def project_to_qubit(psi: StateVector, basis: Bases) -> QubitProjection:
    """Amplitudes on |0>,|1> (or |00>..|11>) and the population left outside."""
    bases = _as_tuple(basis, len(psi.dims))
    if psi.dims != tuple(b.dims[0] for b in bases):
        raise InvalidDimensionError(
            f"State dims {psi.dims} do not match qubit basis dims."
        )
    if len(bases) == 1:
        amplitudes = _computational_matrix(bases[0]).conj() @ psi.amplitudes
    else:
        first = _computational_matrix(bases[0])
        second = _computational_matrix(bases[1])
        joint = psi.amplitudes.reshape(psi.dims)
        amplitudes = (first.conj() @ joint @ second.conj().T).reshape(-1)
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(amplitudes) ** 2)))
    return QubitProjection(amplitudes=amplitudes, leakage=leakage)


def embed_qubit_state(amplitudes: Sequence[complex], basis: Bases) -> StateVector:
    """Map 2 (or 4) qubit amplitudes into Fock space."""
    values = np.asarray(amplitudes, dtype=complex)
    if values.shape == (2,):
        b = _as_tuple(basis, 1)[0]
        return StateVector(_computational_matrix(b).T @ values, b.dims)
    if values.shape == (4,):
        first, second = _as_tuple(basis, 2)
        joint = (
            _computational_matrix(first).T
            @ values.reshape(2, 2)
            @ _computational_matrix(second)
        )
        return StateVector(joint.reshape(-1), first.dims + second.dims)
    raise InvalidDimensionError(
        f"Expected 2 or 4 qubit amplitudes, got {values.shape}."
    )


def ideal_output(
    kind: Union[GateKind, str], angle: float, psi_in: StateVector, basis: Bases
) -> StateVector:
    """Ideal gate applied to the qubit part of psi_in (not renormalized)."""
    projection = project_to_qubit(psi_in, basis)
    gate = ideal_gate(kind, angle)
    return embed_qubit_state(gate.entries @ projection.amplitudes, basis)


def build_protocol(
    kind: Union[GateKind, str],
    angle: float,
    gate_time: float,
    params: ParamsArg,
    ramp_kind: ScheduleKind = ScheduleKind.SINE_SQUARED,
) -> GateProtocol:
    """
    Derive the control schedule for a gate.

    rz: E(t) = pi phi / (8 T sqrt(p0/K)) sin(pi t / T)
    rx: Delta(t) = Delta0 sin^2(pi t / T)
    zz: g(t) = pi Theta / (8 T p0/K) sin(pi t / T)
    init: pump ramp 0 -> p0 over T
    """
    gate = _gate_kind(kind)
    chain = _params_tuple(params)
    expected = 2 if gate is GateKind.ZZ else 1
    if len(chain) != expected:
        raise InvalidDimensionError(
            f"Gate '{gate.value}' needs {expected} oscillator parameter set(s)."
        )
    first = chain[0]
    scale = first.pump / first.kerr

    if gate is GateKind.RZ:
        amplitude = math.pi * angle / (8.0 * gate_time * math.sqrt(scale))
        schedule = PulseSchedule(
            kind=ScheduleKind.SINE, amplitude=amplitude, duration=gate_time
        )
    elif gate is GateKind.RX:
        schedule = PulseSchedule(
            kind=ScheduleKind.SINE_SQUARED, amplitude=angle, duration=gate_time
        )
    elif gate is GateKind.ZZ:
        if chain[1].pump / chain[1].kerr != scale:
            logger.warning(
                "ZZ gate on oscillators with different p0/K; using the first."
            )
        amplitude = math.pi * angle / (8.0 * gate_time * scale)
        schedule = PulseSchedule(
            kind=ScheduleKind.SINE, amplitude=amplitude, duration=gate_time
        )
    else:
        schedule = ramp_schedule(ramp_kind, first.pump, gate_time)

    logger.debug(
        "Built %s protocol: angle=%.6g, schedule=%s", gate.value, angle, schedule
    )
    return GateProtocol(
        kind=gate, angle=angle, gate_time=gate_time, params=chain, schedule=schedule
    )


def protocol_angle(protocol: GateProtocol) -> float:
    """
    Recover the rotation angle from the numerically integrated schedule
    (rz, zz), the recorded Delta0 (rx), or the final pump (init).
    """
    first = protocol.params[0]
    scale = first.pump / first.kerr
    if protocol.kind is GateKind.RZ:
        return 4.0 * math.sqrt(scale) * schedule_integral(protocol.schedule)
    if protocol.kind is GateKind.ZZ:
        return 4.0 * scale * schedule_integral(protocol.schedule)
    if protocol.kind is GateKind.RX:
        return protocol.schedule.amplitude
    return schedule_eval(protocol.schedule, protocol.gate_time)


def protocol_hamiltonian(protocol: GateProtocol) -> TimeDependentHamiltonian:
    """Base Hamiltonian at p = p0, Delta = 0 plus the single scheduled term."""
    first = protocol.params[0].with_detuning(0.0)
    n_max = first.n_max

    if protocol.kind is GateKind.RZ:
        base = kpo_hamiltonian(first)
        term = drive_hamiltonian(1.0, n_max)
    elif protocol.kind is GateKind.RX:
        base = kpo_hamiltonian(first)
        term = number_operator(n_max)
    elif protocol.kind is GateKind.ZZ:
        second = protocol.params[1].with_detuning(0.0)
        base = joint_kpo_hamiltonian(first, second)
        term = coupling_hamiltonian(1.0, n_max, second.n_max)
    else:
        base = kpo_hamiltonian(first.with_pump(0.0))
        term = squeezing_term(n_max)

    return TimeDependentHamiltonian(
        base=base, terms=((term, protocol.schedule),), duration=protocol.gate_time
    )


def run_protocol(
    protocol: GateProtocol,
    psi0: StateVector,
    step: float = Config.STEP,
    sample_every: int = 100,
    keep_states: bool = False,
) -> SimResult:
    for params in protocol.params:
        if params.detuning != 0.0:
            logger.warning(
                "Ignoring static detuning %.4g: gates run at Delta = 0.",
                params.detuning,
            )
    logger.info(
        "Running %s protocol (angle=%.6g, T=%.4g)",
        protocol.kind.value,
        protocol.angle,
        protocol.gate_time,
    )
    result = integrate(
        protocol_hamiltonian(protocol),
        psi0,
        step=step,
        sample_every=sample_every,
        keep_states=keep_states,
    )
    if result.leakage > Config.GATE_LEAKAGE_WARNING:
        logger.warning(
            "%s protocol: truncation leakage %.3e exceeds %.1e; increase n_max.",
            protocol.kind.value,
            result.leakage,
            Config.GATE_LEAKAGE_WARNING,
        )
    elif result.leakage > Config.TRUNCATION_THRESHOLD:
        logger.debug(
            "%s protocol: truncation leakage %.3e", protocol.kind.value, result.leakage
        )
    return result


def initialize_qubit(
    params: KpoParams,
    T_init: float,
    ramp: Optional[PulseSchedule] = None,
    step: float = Config.STEP,
    sample_every: int = 100,
    keep_states: bool = False,
) -> SimResult:
    """
    Ramp the pump 0 -> p0 from the vacuum; the result carries the fidelity to
    the even cat at alpha0 = sqrt(p0/K).
    """
    protocol = build_protocol(GateKind.INIT, 0.0, T_init, params)
    if ramp is not None:
        final_pump = schedule_eval(ramp, T_init)
        if abs(final_pump - params.pump) > 1e-9 * max(1.0, params.pump):
            logger.warning(
                "Ramp ends at p=%.6g but the qubit is defined at p0=%.6g.",
                final_pump,
                params.pump,
            )
        protocol = protocol.model_copy(update={"schedule": ramp})

    result = run_protocol(
        protocol,
        fock_state(0, params.n_max),
        step=step,
        sample_every=sample_every,
        keep_states=keep_states,
    )
    target = qubit_basis(params).cat_even
    return dataclasses.replace(result, fidelity=fidelity(result.final_state, target))


def apply_rz(
    phi: float,
    T_g: float,
    params: KpoParams,
    psi0: StateVector,
    step: float = Config.STEP,
    sample_every: int = 100,
    keep_states: bool = False,
) -> SimResult:
    protocol = build_protocol(GateKind.RZ, phi, T_g, params)
    result = run_protocol(protocol, psi0, step, sample_every, keep_states)
    ideal = ideal_output(GateKind.RZ, phi, psi0, qubit_basis(params))
    return dataclasses.replace(result, fidelity=fidelity(result.final_state, ideal))


def apply_rx(
    delta0: float,
    T_g: float,
    params: KpoParams,
    psi0: StateVector,
    step: float = Config.STEP,
    sample_every: int = 100,
    keep_states: bool = False,
) -> SimResult:
    """Detuning pulse Delta(t) = Delta0 sin^2(pi t / T_g); see extract_theta."""
    protocol = build_protocol(GateKind.RX, delta0, T_g, params)
    return run_protocol(protocol, psi0, step, sample_every, keep_states)


def apply_zz(
    Theta: float,
    T_g: float,
    params: Sequence[KpoParams],
    psi0: StateVector,
    step: float = Config.STEP,
    sample_every: int = 100,
    keep_states: bool = False,
) -> SimResult:
    chain = _params_tuple(params)
    protocol = build_protocol(GateKind.ZZ, Theta, T_g, chain)
    expected = tuple(p.dim for p in chain)
    if psi0.dims != expected:
        raise InvalidDimensionError(f"ZZ input dims {psi0.dims} != {expected}.")
    result = run_protocol(protocol, psi0, step, sample_every, keep_states)
    bases = tuple(qubit_basis(p) for p in chain)
    ideal = ideal_output(GateKind.ZZ, Theta, psi0, bases)
    return dataclasses.replace(result, fidelity=fidelity(result.final_state, ideal))


def _wrap_theta(theta: float) -> float:
    """Map onto (-2 pi, 0]; values a hair above -2 pi snap to 0."""
    wrapped = -((-theta) % TWO_PI)
    if wrapped <= -TWO_PI + 1e-9:
        return 0.0
    return wrapped + 0.0


def _cat_components(psi: StateVector, basis: QubitBasis) -> np.ndarray:
    return np.array(
        [
            np.vdot(basis.cat_even.amplitudes, psi.amplitudes),
            np.vdot(basis.cat_odd.amplitudes, psi.amplitudes),
        ]
    )


def _rx_fidelity(
    theta: float, psi_out: StateVector, psi_in: StateVector, basis: QubitBasis
) -> float:
    return fidelity(psi_out, ideal_output(GateKind.RX, theta, psi_in, basis))


def search_theta(
    psi_out: StateVector, psi_in: StateVector, basis: QubitBasis, grid_points: int = 64
) -> float:
    """Golden-section maximization of F(theta) over (-2 pi, 0]."""
    grid = np.linspace(-TWO_PI, 0.0, grid_points, endpoint=False) + TWO_PI / grid_points
    scores = [_rx_fidelity(float(t), psi_out, psi_in, basis) for t in grid]
    best = int(np.argmax(scores))
    spacing = TWO_PI / grid_points
    bracket = (
        grid[best] - spacing + _SEARCH_OFFSET,
        grid[best] + _SEARCH_OFFSET,
        grid[best] + spacing + _SEARCH_OFFSET,
    )
    result = minimize_scalar(
        lambda u: -_rx_fidelity(u - _SEARCH_OFFSET, psi_out, psi_in, basis),
        bracket=bracket,
        method="golden",
        tol=1e-10,
    )
    return _wrap_theta(float(result.x) - _SEARCH_OFFSET)


def extract_theta(
    psi_out: StateVector, psi_in: StateVector, basis: QubitBasis
) -> ThetaEstimate:
    """
    Rotation angle from the relative phase the odd cat acquires against the
    even cat: theta = arg(c-/c+)_out - arg(c-/c+)_in, wrapped to (-2 pi, 0].
    Cross-checked against a fidelity search.
    """
    if psi_in.is_composite or psi_out.dims != psi_in.dims:
        raise InvalidDimensionError(
            "extract_theta needs matching single-oscillator states."
        )

    c_in = _cat_components(psi_in, basis)
    c_out = _cat_components(psi_out, basis)
    if np.min(np.abs(c_in)) < 1e-8:
        raise UnidentifiableAngleError(
            "Input lies in a single parity sector; R_x angle is unidentifiable."
        )
    if np.min(np.abs(c_out)) < 1e-12:
        raise UnidentifiableAngleError("Output lost one parity sector entirely.")

    raw = float(np.angle(c_out[1] / c_out[0]) - np.angle(c_in[1] / c_in[0]))
    theta = _wrap_theta(raw)

    score = _rx_fidelity(theta, psi_out, psi_in, basis)
    estimate = ThetaEstimate(
        theta=theta, fidelity=score, searched=search_theta(psi_out, psi_in, basis)
    )
    if not estimate.agrees:
        logger.warning(
            "Phase-ratio theta %.8f and searched theta %.8f disagree by %.2e rad.",
            estimate.theta,
            estimate.searched,
            estimate.disagreement,
        )
    return estimate
