"""
Unit tests for the truncated Fock-space primitives.
"""

import math

import numpy as np
import pytest

from src.exceptions import InvalidDimensionError, ZeroVectorError
from src.models.dynamics import QubitBasis
from src.models.state import PhaseSpaceGrid, StateVector
from src.services.fock import (
    CatParity,
    annihilation_operator,
    cat_state,
    coherent_state,
    coherent_truncation_deficit,
    creation_operator,
    embed,
    fidelity,
    fock_state,
    identity_operator,
    inner_product,
    number_operator,
    parity_expectation,
    parity_operator,
    phase_aligned_distance,
    photon_number_expectation,
    tensor,
    truncation_leakage,
    wigner,
)


def test_annihilation_smallest_truncation() -> None:
    a = annihilation_operator(1)
    assert a.dims == (2,)
    np.testing.assert_array_equal(a.entries, [[0, 1], [0, 0]])


def test_annihilation_entries_are_square_roots() -> None:
    a = annihilation_operator(2)
    assert a.entries[1, 2] == pytest.approx(math.sqrt(2), abs=1e-15)
    assert a.entries[0, 1] == 1.0
    assert a.entries[2, 1] == 0.0


def test_commutator_identity_off_the_boundary() -> None:
    a = annihilation_operator(20)
    commutator = a.commutator(creation_operator(20)).entries
    expected = np.eye(21)
    expected[20, 20] = -20.0
    np.testing.assert_allclose(commutator, expected, atol=1e-12)


def test_annihilation_rejects_empty_truncation() -> None:
    with pytest.raises(InvalidDimensionError):
        annihilation_operator(0)


def test_number_operator_matches_ladder_product() -> None:
    a = annihilation_operator(6)
    np.testing.assert_allclose(
        (a.dagger() @ a).entries, number_operator(6).entries, atol=1e-12
    )


def test_coherent_state_is_normalized_eigenvector() -> None:
    psi = coherent_state(2.0, 20)
    assert abs(psi.norm() - 1.0) < 1e-12

    residual = annihilation_operator(20).apply(psi).amplitudes - 2.0 * psi.amplitudes
    # The last row feels the truncation boundary
    assert np.max(np.abs(residual[:-1])) < 1e-6


def test_coherent_truncation_deficit_is_tiny_for_alpha_two() -> None:
    deficit = coherent_truncation_deficit(2.0, 20)
    assert 0.0 <= deficit < 1e-8
    assert coherent_truncation_deficit(4.0, 20) > deficit


def test_coherent_state_warns_on_inadequate_truncation(caplog) -> None:
    coherent_state(4.0, 20)
    assert "may be inadequate" in caplog.text


@pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0])
def test_opposite_coherent_states_overlap(alpha: float) -> None:
    overlap = fidelity(coherent_state(alpha, 20), coherent_state(-alpha, 20))
    assert overlap == pytest.approx(math.exp(-4 * alpha**2), abs=1e-10)


def test_cat_states_have_exact_parity() -> None:
    even = cat_state(2.0, CatParity.EVEN, 20)
    odd = cat_state(2.0, "odd", 20)

    assert np.all(even.amplitudes[1::2] == 0)
    assert np.all(odd.amplitudes[0::2] == 0)
    assert parity_expectation(even) == pytest.approx(1.0, abs=1e-12)
    assert parity_expectation(odd) == pytest.approx(-1.0, abs=1e-12)
    assert inner_product(even, odd) == 0


def test_cat_at_zero_amplitude() -> None:
    vacuum = cat_state(0.0, CatParity.EVEN, 5)
    assert fidelity(vacuum, fock_state(0, 5)) == pytest.approx(1.0, abs=1e-12)

    with pytest.raises(ZeroVectorError):
        cat_state(0.0, CatParity.ODD, 5)


def test_even_cat_against_computational_zero(basis: QubitBasis) -> None:
    # Half of |0> lies in each parity sector
    assert fidelity(basis.cat_even, basis.zero) == pytest.approx(0.5, abs=1e-12)
    # (1 + e^(-2 p0/K)) / 2 against the coherent state |alpha0>
    assert fidelity(basis.cat_even, coherent_state(2.0, 20)) == pytest.approx(
        (1 + math.exp(-8.0)) / 2, abs=1e-8
    )


def test_tensor_uses_first_oscillator_slow_ordering() -> None:
    joint = tensor(fock_state(1, 2), fock_state(2, 3))
    assert joint.dims == (3, 4)
    assert joint.amplitudes[1 * 4 + 2] == 1.0


def test_tensor_is_linear_in_scalars() -> None:
    psi = coherent_state(0.5, 4)
    phi = cat_state(1.0, CatParity.ODD, 5)
    c = 0.3 - 0.4j

    np.testing.assert_allclose(
        tensor(psi.scaled(c), phi).amplitudes,
        c * tensor(psi, phi).amplitudes,
        atol=1e-15,
    )
    np.testing.assert_allclose(
        tensor(psi, phi.scaled(c)).amplitudes,
        c * tensor(psi, phi).amplitudes,
        atol=1e-15,
    )


def test_tensor_rejects_three_oscillators() -> None:
    joint = tensor(fock_state(0, 1), fock_state(0, 1))
    with pytest.raises(InvalidDimensionError):
        tensor(joint, fock_state(0, 1))


def test_embed_matches_kronecker_product() -> None:
    a = annihilation_operator(2)
    first = embed(a, 0, (3, 4))
    second = embed(annihilation_operator(3), 1, (3, 4))

    np.testing.assert_allclose(first.entries, np.kron(a.entries, np.eye(4)))
    np.testing.assert_allclose(
        second.entries, np.kron(np.eye(3), annihilation_operator(3).entries)
    )
    with pytest.raises(InvalidDimensionError):
        embed(a, 1, (3, 4))


def test_identity_and_parity_operators() -> None:
    assert identity_operator((2, 3)).dim == 6
    np.testing.assert_array_equal(
        np.diag(parity_operator((2, 2)).entries).real, [1, -1, -1, 1]
    )


def test_fidelity_and_phase_aligned_distance() -> None:
    psi = coherent_state(1.0 + 0.5j, 12)
    rotated = psi.scaled(np.exp(0.7j))

    assert fidelity(psi, rotated) == pytest.approx(1.0, abs=1e-12)
    assert phase_aligned_distance(psi, rotated) < 1e-12
    assert phase_aligned_distance(psi, fock_state(0, 12)) > 0.1


def test_inner_product_rejects_mismatched_dims() -> None:
    with pytest.raises(InvalidDimensionError):
        inner_product(fock_state(0, 2), fock_state(0, 3))


def test_photon_number_expectation() -> None:
    assert photon_number_expectation(coherent_state(1.0, 20)) == pytest.approx(
        1.0, abs=1e-9
    )
    joint = tensor(fock_state(1, 3), fock_state(2, 3))
    assert photon_number_expectation(joint) == pytest.approx(3.0)


def test_truncation_leakage_counts_top_levels() -> None:
    assert truncation_leakage(fock_state(20, 20)) == pytest.approx(1.0)
    assert truncation_leakage(fock_state(19, 20)) == pytest.approx(1.0)
    assert truncation_leakage(fock_state(18, 20)) == 0.0
    joint = tensor(fock_state(0, 4), fock_state(4, 4))
    assert truncation_leakage(joint) == pytest.approx(1.0)


def test_vacuum_wigner_peak() -> None:
    grid = PhaseSpaceGrid.square(1.0, 3)
    values = wigner(fock_state(0, 10), grid).values
    assert values[1, 1] == pytest.approx(2.0 / math.pi, abs=1e-12)


def test_odd_cat_wigner_is_negative_at_origin() -> None:
    grid = PhaseSpaceGrid.square(1.0, 3)
    values = wigner(cat_state(2.0, CatParity.ODD, 20), grid).values
    assert values[1, 1] == pytest.approx(-2.0 / math.pi, abs=1e-9)


def test_cat_wigner_integrates_to_one() -> None:
    grid = PhaseSpaceGrid.square(6.0, 121)
    wigner_map = wigner(cat_state(2.0, CatParity.EVEN, 20), grid)
    assert wigner_map.integral() == pytest.approx(1.0, abs=1e-3)


def test_coherent_wigner_peaks_at_alpha() -> None:
    grid = PhaseSpaceGrid.square(2.0, 41)
    x, p = wigner(coherent_state(1.5 + 0.5j, 20), grid).peak()
    assert x == pytest.approx(1.5, abs=1e-9)
    assert p == pytest.approx(0.5, abs=1e-9)


def test_wigner_rejects_joint_states() -> None:
    joint = tensor(fock_state(0, 2), fock_state(0, 2))
    with pytest.raises(InvalidDimensionError):
        wigner(joint, PhaseSpaceGrid.square(1.0, 3))


def test_state_vector_validates_dims() -> None:
    with pytest.raises(InvalidDimensionError):
        StateVector(np.zeros(5), (2, 3))
    with pytest.raises(ZeroVectorError):
        StateVector(np.zeros(3), (3,)).normalized()
