"""
Fock-space data carriers: state vectors, dense operators and phase-space maps.

Both StateVector and Operator are immutable: their arrays are copied on
construction and flagged read-only, so they can be shared between sweep
workers without locking.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from src.exceptions import InvalidDimensionError, ZeroVectorError

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]


def _frozen(values: object, ndim: int) -> ComplexArray:
    array = np.array(values, dtype=np.complex128, copy=True)
    if array.ndim != ndim:
        raise InvalidDimensionError(f"Expected a {ndim}-d array, got {array.ndim}-d.")
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class StateVector:
    """
    Complex amplitudes over a truncated Fock basis.

    For two oscillators the index is n1 * dim2 + n2 (oscillator 1 slow).
    """

    amplitudes: ComplexArray
    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes, 1))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise InvalidDimensionError(f"Invalid dims {self.dims}.")
        if self.amplitudes.shape[0] != math.prod(self.dims):
            raise InvalidDimensionError(
                f"Amplitude length {self.amplitudes.shape[0]} does not match "
                f"dims {self.dims}."
            )

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def is_composite(self) -> bool:
        return len(self.dims) > 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        norm = self.norm()
        if norm == 0.0:
            raise ZeroVectorError("Cannot normalize the zero vector.")
        return StateVector(self.amplitudes / norm, self.dims)

    def scaled(self, factor: complex) -> StateVector:
        return StateVector(factor * self.amplitudes, self.dims)

    def populations(self) -> RealArray:
        return np.abs(self.amplitudes) ** 2

    def __add__(self, other: StateVector) -> StateVector:
        if self.dims != other.dims:
            raise InvalidDimensionError(f"dims {self.dims} != {other.dims}")
        return StateVector(self.amplitudes + other.amplitudes, self.dims)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + other.scaled(-1.0)


@dataclass(frozen=True)
class Operator:
    """Dense square complex matrix with per-oscillator dimension metadata."""

    entries: ComplexArray
    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", _frozen(self.entries, 2))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        rows, cols = self.entries.shape
        if rows != cols or rows != math.prod(self.dims):
            raise InvalidDimensionError(
                f"Operator shape {self.entries.shape} does not match dims {self.dims}."
            )

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def is_composite(self) -> bool:
        return len(self.dims) > 1

    def dagger(self) -> Operator:
        return Operator(self.entries.conj().T, self.dims)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_error() < tol

    def apply(self, state: StateVector) -> StateVector:
        if state.dims != self.dims:
            raise InvalidDimensionError(
                f"Operator dims {self.dims} != state dims {state.dims}."
            )
        return StateVector(self.entries @ state.amplitudes, self.dims)

    def commutator(self, other: Operator) -> Operator:
        return self @ other - other @ self

    def __matmul__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.entries @ other.entries, self.dims)

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.entries + other.entries, self.dims)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.entries - other.entries, self.dims)

    def __mul__(self, factor: complex) -> Operator:
        return Operator(factor * self.entries, self.dims)

    __rmul__ = __mul__

    def _check(self, other: Operator) -> None:
        if self.dims != other.dims:
            raise InvalidDimensionError(f"dims {self.dims} != {other.dims}")


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Rectangular grid over beta = x + i p."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    resolution: int

    def __post_init__(self) -> None:
        if self.resolution < 2:
            raise InvalidDimensionError("Phase-space grid needs resolution >= 2.")
        if self.x_max <= self.x_min or self.p_max <= self.p_min:
            raise InvalidDimensionError("Phase-space grid ranges must be increasing.")

    @classmethod
    def square(cls, extent: float, resolution: int) -> PhaseSpaceGrid:
        return cls(-extent, extent, -extent, extent, resolution)

    @property
    def xvec(self) -> RealArray:
        return np.linspace(self.x_min, self.x_max, self.resolution)

    @property
    def pvec(self) -> RealArray:
        return np.linspace(self.p_min, self.p_max, self.resolution)

    @property
    def cell_area(self) -> float:
        dx = (self.x_max - self.x_min) / (self.resolution - 1)
        dp = (self.p_max - self.p_min) / (self.resolution - 1)
        return dx * dp


@dataclass(frozen=True)
class WignerMap:
    """Wigner values indexed as values[p_index, x_index]."""

    grid: PhaseSpaceGrid
    values: RealArray = field(repr=False)

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_area)

    def peak(self) -> Tuple[float, float]:
        """Return (x, p) of the maximum."""
        p_idx, x_idx = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.grid.xvec[x_idx]), float(self.grid.pvec[p_idx])
