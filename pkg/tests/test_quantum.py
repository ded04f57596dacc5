"""Tests for the spin-1/2 primitives."""

from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from fluxspin.exceptions import InvalidModelError, InvalidStateError
from fluxspin.quantum import (
    BlochVector,
    DensityMatrix,
    PrecessionVector,
    bloch_from_density,
    density_from_bloch,
    hamiltonian,
    liouvillian,
    rotate_bloch,
    trace_distance,
)


def test_hamiltonian_is_hermitian_with_half_frequency_splitting() -> None:
    """Test H = w.sigma/2 has eigenvalues +-|w|/2."""
    omega = PrecessionVector(0.3, -1.2, 0.7)
    h = hamiltonian(omega)

    assert_allclose(h, h.conj().T)
    assert_allclose(np.linalg.eigvalsh(h), [-omega.norm / 2, omega.norm / 2])


def test_liouvillian_of_zero_field_vanishes() -> None:
    """Test a null precession vector gives no coherent evolution."""
    assert_allclose(liouvillian(PrecessionVector.zero()), np.zeros((4, 4)))


def test_liouvillian_precesses_like_rotation() -> None:
    """Test exp(L t) on a density matrix matches ds/dt = w x s."""
    omega = PrecessionVector(0.4, 0.9, -1.3)
    start = BlochVector.from_array([0.6, 0.0, 0.8])
    rho = density_from_bloch(start)

    evolved = DensityMatrix.from_vector(expm(liouvillian(omega) * 2.3) @ rho.as_vector())
    expected = rotate_bloch(start.as_array(), omega.as_array(), 2.3)

    assert_allclose(bloch_from_density(evolved).as_array(), expected, atol=1e-12)


def test_rotation_about_z_turns_x_into_y() -> None:
    """Test the precession sense is right-handed."""
    result = rotate_bloch([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], math.pi / 2)

    assert_allclose(result, [0.0, 1.0, 0.0], atol=1e-15)


def test_bloch_density_round_trip(rng: np.random.Generator) -> None:
    """Test Bloch -> density -> Bloch is exact to 1e-12."""
    for _ in range(50):
        direction = rng.normal(size=3)
        b = BlochVector.from_array(rng.uniform(0, 1) * direction / np.linalg.norm(direction))
        back = bloch_from_density(density_from_bloch(b))
        assert_allclose(back.as_array(), b.as_array(), atol=1e-12)
        assert back.weight == pytest.approx(1.0)


@pytest.mark.parametrize(
    ("axis", "expected"),
    [
        ("+x", (1.0, 0.0, 0.0)),
        ("-y", (0.0, -1.0, 0.0)),
        ("z", (0.0, 0.0, 1.0)),
        ((0.0, 3.0, 4.0), (0.0, 0.6, 0.8)),
    ],
)
def test_along_named_and_vector_axes(axis: str | tuple[float, ...], expected: tuple[float, ...]) -> None:
    """Test pure states along axis names and arbitrary vectors."""
    assert_allclose(BlochVector.along(axis).as_array(), expected)


@pytest.mark.parametrize("axis", ["+w", (0.0, 0.0, 0.0), (1.0, 2.0)])
def test_along_rejects_bad_axes(axis: str | tuple[float, ...]) -> None:
    """Test unknown names and null vectors are rejected."""
    with pytest.raises(InvalidModelError):
        BlochVector.along(axis)


def test_unphysical_bloch_vector_rejected() -> None:
    """Test |s| > 1 has no density matrix."""
    with pytest.raises(InvalidStateError) as err:
        density_from_bloch(BlochVector(1.0, 0.5, 0.0))

    assert err.value.translation_key == "unphysical_bloch"


def test_density_matrix_rejects_non_hermitian_input() -> None:
    """Test Hermiticity drift above tolerance is an error."""
    with pytest.raises(InvalidStateError) as err:
        DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]]))

    assert err.value.translation_key == "not_hermitian"


def test_density_matrix_rejects_negative_eigenvalue() -> None:
    """Test positivity is enforced."""
    with pytest.raises(InvalidStateError) as err:
        DensityMatrix(np.array([[1.2, 0.0], [0.0, -0.2]]))

    assert err.value.translation_key == "not_positive"


def test_density_matrix_is_immutable() -> None:
    """Test the stored matrix cannot be modified in place."""
    rho = density_from_bloch(BlochVector.along("+x"))

    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0.0


def test_trace_distance_of_orthogonal_states_is_one() -> None:
    """Test maximal distinguishability."""
    up = density_from_bloch(BlochVector.along("+z"))
    down = density_from_bloch(BlochVector.along("-z"))

    assert trace_distance(up, down) == pytest.approx(1.0)
    assert trace_distance(up, up) == pytest.approx(0.0)


def test_precession_vector_validation() -> None:
    """Test non-finite components are rejected."""
    with pytest.raises(InvalidModelError):
        PrecessionVector(float("nan"), 0.0, 0.0)
    with pytest.raises(InvalidModelError):
        PrecessionVector.from_array([1.0, 2.0])


def test_precession_vector_arithmetic() -> None:
    """Test vector operations stay PrecessionVectors."""
    a = PrecessionVector(1.0, 2.0, 3.0)
    b = PrecessionVector(0.5, 0.0, -1.0)

    assert a + b == PrecessionVector(1.5, 2.0, 2.0)
    assert a - b == PrecessionVector(0.5, 2.0, 4.0)
    assert 2 * b == PrecessionVector(1.0, 0.0, -2.0)
    assert -b == PrecessionVector(-0.5, 0.0, 1.0)
    assert a.dot(b) == pytest.approx(-2.5)
