"""
Truncated Fock-Space Service.

Builds ladder operators, coherent and cat states, tensor products, and the
state diagnostics (fidelity, parity, photon number, truncation leakage,
Wigner function) used throughout the simulator. Dense matrices only: a
joint space of two oscillators at n_max=20 has dimension 441.
"""

import logging
import math
from enum import Enum
from typing import Sequence, Tuple, TypeVar, Union, overload

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from src.exceptions import InvalidDimensionError, ZeroVectorError
from src.models.state import Operator, PhaseSpaceGrid, StateVector, WignerMap

logger = logging.getLogger(__name__)

T = TypeVar("T", StateVector, Operator)


class CatParity(str, Enum):
    EVEN = "even"
    ODD = "odd"


def _check_n_max(n_max: int) -> int:
    if int(n_max) < 1:
        raise InvalidDimensionError(f"n_max must be >= 1, got {n_max}.")
    return int(n_max)


def annihilation_operator(n_max: int) -> Operator:
    """Return a with a[n-1, n] = sqrt(n) on the basis |0>..|n_max>."""
    n_max = _check_n_max(n_max)
    entries = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)
    return Operator(entries, (n_max + 1,))


def creation_operator(n_max: int) -> Operator:
    return annihilation_operator(n_max).dagger()


def number_operator(n_max: int) -> Operator:
    n_max = _check_n_max(n_max)
    return Operator(np.diag(np.arange(n_max + 1, dtype=float)), (n_max + 1,))


def identity_operator(dims: Sequence[int]) -> Operator:
    return Operator(np.eye(math.prod(dims)), tuple(dims))


def _parity_diagonal(dims: Sequence[int]) -> np.ndarray:
    diagonal = np.ones(1)
    for d in dims:
        diagonal = np.kron(diagonal, (-1.0) ** np.arange(d))
    return diagonal


def parity_operator(dims: Sequence[int]) -> Operator:
    """(-1)^(a†a), or the product parity for two oscillators."""
    return Operator(np.diag(_parity_diagonal(dims)), tuple(dims))


def fock_state(n: int, n_max: int) -> StateVector:
    n_max = _check_n_max(n_max)
    if not 0 <= n <= n_max:
        raise InvalidDimensionError(f"Fock index {n} outside 0..{n_max}.")
    amplitudes = np.zeros(n_max + 1, dtype=complex)
    amplitudes[n] = 1.0
    return StateVector(amplitudes, (n_max + 1,))


def _coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Unnormalized-by-truncation amplitudes e^(-|a|^2/2) a^n / sqrt(n!)."""
    ratios = np.concatenate(
        ([1.0 + 0j], alpha / np.sqrt(np.arange(1, n_max + 1, dtype=float)))
    )
    return math.exp(-abs(alpha) ** 2 / 2.0) * np.cumprod(ratios)


def coherent_truncation_deficit(alpha: complex, n_max: int) -> float:
    """Probability weight of |alpha> lost above n_max."""
    n_max = _check_n_max(n_max)
    kept = float(np.sum(np.abs(_coherent_amplitudes(alpha, n_max)) ** 2))
    return max(0.0, 1.0 - kept)


def _check_adequacy(alpha: complex, n_max: int) -> None:
    if abs(alpha) ** 2 + 6.0 * abs(alpha) > n_max:
        logger.warning(
            "Truncation n_max=%d may be inadequate for |alpha|=%.4g "
            "(recommended |alpha|^2 + 6|alpha| <= n_max).",
            n_max,
            abs(alpha),
        )


def coherent_state(alpha: complex, n_max: int) -> StateVector:
    """Coherent state |alpha>, renormalized after truncation."""
    n_max = _check_n_max(n_max)
    _check_adequacy(alpha, n_max)

    amplitudes = _coherent_amplitudes(alpha, n_max)
    deficit = max(0.0, 1.0 - float(np.sum(np.abs(amplitudes) ** 2)))
    logger.debug(
        "Coherent state alpha=%s, n_max=%d: truncation deficit %.3e",
        alpha,
        n_max,
        deficit,
    )
    return StateVector(amplitudes, (n_max + 1,)).normalized()


def cat_state(
    alpha: complex, parity: Union[CatParity, str], n_max: int
) -> StateVector:
    """
    Even or odd cat (|alpha> +/- |-alpha>) / N.

    Amplitudes of the opposite parity are exactly zero.
    """
    n_max = _check_n_max(n_max)
    parity = CatParity(parity)
    _check_adequacy(alpha, n_max)

    amplitudes = _coherent_amplitudes(alpha, n_max)
    signs = (-1.0) ** np.arange(n_max + 1)
    if parity is CatParity.EVEN:
        combined = amplitudes * (1.0 + signs)
    else:
        combined = amplitudes * (1.0 - signs)

    if not np.any(combined):
        raise ZeroVectorError(f"The {parity.value} cat with alpha={alpha} vanishes.")
    return StateVector(combined, (n_max + 1,)).normalized()


def inner_product(psi: StateVector, phi: StateVector) -> complex:
    """<psi|phi>."""
    if psi.dims != phi.dims:
        raise InvalidDimensionError(f"dims {psi.dims} != {phi.dims}")
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def fidelity(psi: StateVector, phi: StateVector) -> float:
    """|<psi|phi>|^2."""
    return abs(inner_product(psi, phi)) ** 2


def phase_aligned_distance(psi: StateVector, phi: StateVector) -> float:
    """min over chi of ||psi - e^{i chi} phi||."""
    overlap = inner_product(phi, psi)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(psi.amplitudes - phase * phi.amplitudes))


@overload
def tensor(a: StateVector, b: StateVector) -> StateVector: ...


@overload
def tensor(a: Operator, b: Operator) -> Operator: ...


def tensor(a: T, b: T) -> T:
    """Kronecker product, oscillator 1 slow."""
    if a.is_composite or b.is_composite:
        raise InvalidDimensionError("tensor supports at most two oscillators.")
    dims = a.dims + b.dims
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), dims)
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.entries, b.entries), dims)
    raise TypeError("tensor needs two states or two operators.")


def embed(operator: Operator, which: int, dims: Tuple[int, int]) -> Operator:
    """Lift a single-oscillator operator onto oscillator `which` (0 or 1)."""
    if operator.is_composite or operator.dim != dims[which]:
        raise InvalidDimensionError(
            f"Cannot embed operator of dims {operator.dims} at slot {which} of {dims}."
        )
    identity = identity_operator((dims[1 - which],))
    if which == 0:
        return tensor(operator, identity)
    return tensor(identity, operator)


def parity_expectation(psi: StateVector) -> float:
    return float(np.dot(_parity_diagonal(psi.dims), psi.populations()))


def photon_number_expectation(psi: StateVector) -> float:
    """Total <N1 + N2> (or <N> for one oscillator)."""
    populations = psi.populations().reshape(psi.dims)
    total = 0.0
    for axis, d in enumerate(psi.dims):
        other = tuple(i for i in range(len(psi.dims)) if i != axis)
        marginal = populations.sum(axis=other) if other else populations
        total += float(np.dot(np.arange(d), marginal))
    return total


def truncation_leakage(psi: StateVector, levels: int = 2) -> float:
    """Population with any oscillator in its top `levels` Fock states."""
    populations = psi.populations().reshape(psi.dims)
    mask = np.zeros(psi.dims, dtype=bool)
    for axis, d in enumerate(psi.dims):
        index = [slice(None)] * len(psi.dims)
        index[axis] = slice(max(0, d - levels), d)
        mask[tuple(index)] = True
    return float(populations[mask].sum())


def wigner(psi: StateVector, grid: PhaseSpaceGrid) -> WignerMap:
    """
    W(beta) = (2/pi) <psi| D(beta) P D(beta)^† |psi>, beta = x + i p.

    Evaluated with the Laguerre expansion of the displaced parity, which is
    exact for the truncated state. Normalization: integral over d^2 beta is 1
    and the vacuum peaks at 2/pi.
    """
    if psi.is_composite:
        raise InvalidDimensionError("Wigner function needs a single-oscillator state.")

    x, p = np.meshgrid(grid.xvec, grid.pvec)
    beta = x + 1j * p
    radius = 4.0 * np.abs(beta) ** 2
    c = psi.amplitudes
    rho = np.outer(c, c.conj())
    total = np.zeros_like(radius)

    for m in range(psi.dim):
        if rho[m, m].real != 0.0:
            total += rho[m, m].real * (-1.0) ** m * eval_genlaguerre(m, 0, radius)
        for n in range(m + 1, psi.dim):
            if rho[m, n] == 0:
                continue
            k = n - m
            ratio = math.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)))
            coefficient = (-1.0) ** m * ratio
            total += 2.0 * np.real(
                rho[m, n]
                * coefficient
                * (2.0 * beta) ** k
                * eval_genlaguerre(m, k, radius)
            )

    values = (2.0 / math.pi) * np.exp(-2.0 * np.abs(beta) ** 2) * total
    return WignerMap(grid=grid, values=values)
