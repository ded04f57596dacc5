"""Tests for telegraph trajectories and the Monte Carlo ensemble."""

from __future__ import annotations

from collections.abc import Callable
from typing import Any

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fluxspin.exceptions import InvalidStateError, InvalidTimeGridError
from fluxspin.fluctuator import FluctuatorSpec, stationary_distribution
from fluxspin.propagator import (
    Occupation,
    build_generator,
    initial_joint_state,
    reduced_bloch_series,
)
from fluxspin.quantum import BlochVector, PrecessionVector, rotate_bloch
from fluxspin.sampler import (
    bloch_series,
    derive_seed,
    ensemble_average,
    evolve_bloch,
    sample_trajectory,
)


def test_derive_seed_is_deterministic_and_keyed() -> None:
    """Test sub-seeds depend on the master seed and the key only."""
    assert derive_seed(7, 3, 1) == derive_seed(7, 3, 1)
    assert derive_seed(7, 3, 1) != derive_seed(7, 3, 0)
    assert derive_seed(7, 3, 1) != derive_seed(8, 3, 1)
    assert 0 <= derive_seed(7) < 2**64


def test_trajectory_covers_duration(three_state_spec: FluctuatorSpec) -> None:
    """Test dwell times reach the readout time and jumps change state."""
    traj = sample_trajectory(three_state_spec, 0, 25.0, seed=11)

    assert sum(traj.dwells) >= 25.0
    assert sum(traj.dwells[:-1]) < 25.0
    assert traj.states[0] == 0
    assert all(a != b for a, b in zip(traj.states, traj.states[1:]))
    assert not traj.absorbed
    assert traj.occupancy(3).sum() == pytest.approx(1.0)


def test_trajectory_is_reproducible(three_state_spec: FluctuatorSpec) -> None:
    """Test the same seed gives the same path."""
    assert sample_trajectory(three_state_spec, 1, 10.0, 5) == sample_trajectory(
        three_state_spec, 1, 10.0, 5
    )


def test_mean_dwell_matches_exit_rate() -> None:
    """Test exponential dwell times with mean 1 / r_jj."""
    spec = FluctuatorSpec.two_state(2.0, 0.5, PrecessionVector.zero(), PrecessionVector.zero())
    dwells: dict[int, list[float]] = {0: [], 1: []}
    traj = sample_trajectory(spec, 0, 20000.0, seed=3)
    for state, dwell in zip(traj.states[:-1], traj.dwells[:-1], strict=True):
        dwells[state].append(dwell)

    assert np.mean(dwells[0]) == pytest.approx(0.5, rel=0.05)
    assert np.mean(dwells[1]) == pytest.approx(2.0, rel=0.05)


def test_occupancy_converges_to_stationary(three_state_spec: FluctuatorSpec) -> None:
    """Test a long path spends the stationary fraction of time in each state."""
    traj = sample_trajectory(three_state_spec, 0, 50000.0, seed=8)

    assert_allclose(traj.occupancy(3), stationary_distribution(three_state_spec).p, atol=0.02)


def test_jump_count_matches_switching_rate() -> None:
    """Test a symmetric telegraph process jumps r T times on average."""
    spec = FluctuatorSpec.two_state(2.0, 2.0, PrecessionVector.zero(), PrecessionVector.zero())

    counts = [sample_trajectory(spec, 0, 1000.0, seed=s).n_jumps for s in range(5)]

    assert np.mean(counts) == pytest.approx(2.0 * 1000.0, rel=0.03)


def test_stderr_shrinks_with_trajectory_count(three_state_spec: FluctuatorSpec) -> None:
    """Test doubling the ensemble divides the standard error by about sqrt(2)."""
    grid = np.linspace(0.0, 3.0, 4)
    args = (three_state_spec, BlochVector.along("+x"), Occupation.STATIONARY)

    small = ensemble_average(*args, 2000, grid, 21)
    large = ensemble_average(*args, 4000, grid, 21)

    ratio = np.mean(large.stderr[1:]) / np.mean(small.stderr[1:])
    assert ratio == pytest.approx(1.0 / np.sqrt(2.0), rel=0.05)


def test_absorbing_state_is_flagged() -> None:
    """Test a state without exits ends the trajectory."""
    rates = np.array([[0.0, 0.0], [1.0, 0.0]])
    spec = FluctuatorSpec(rates, (PrecessionVector.zero(), PrecessionVector.zero()))

    traj = sample_trajectory(spec, 0, 1000.0, seed=1)

    assert traj.absorbed
    assert traj.states[-1] == 1
    assert sum(traj.dwells) == pytest.approx(1000.0)


def test_invalid_start_state(three_state_spec: FluctuatorSpec) -> None:
    """Test the start index is checked."""
    with pytest.raises(InvalidStateError) as err:
        sample_trajectory(three_state_spec, 3, 1.0, 0)

    assert err.value.translation_key == "invalid_state_index"


def test_invalid_duration(three_state_spec: FluctuatorSpec) -> None:
    """Test a non-positive readout time is rejected."""
    with pytest.raises(InvalidTimeGridError):
        sample_trajectory(three_state_spec, 0, 0.0, 0)


def test_evolve_bloch_preserves_length(three_state_spec: FluctuatorSpec) -> None:
    """Test a single trajectory is a pure rotation."""
    traj = sample_trajectory(three_state_spec, 0, 12.0, seed=4)
    end = evolve_bloch(traj, BlochVector.along((1.0, 2.0, 2.0)), three_state_spec.omegas)

    assert end.norm == pytest.approx(1.0)


def test_evolve_bloch_single_state_is_rotation() -> None:
    """Test a static field rotates the spin deterministically."""
    omega = PrecessionVector(0.2, 0.0, 1.1)
    spec = FluctuatorSpec.single_state(omega)
    traj = sample_trajectory(spec, 0, 3.0, seed=0)
    spin = BlochVector.along("+x")

    end = evolve_bloch(traj, spin, spec.omegas)

    assert not traj.absorbed
    assert_allclose(end.as_array(), rotate_bloch(spin.as_array(), omega.as_array(), 3.0))


def test_bloch_series_ends_at_evolved_vector(three_state_spec: FluctuatorSpec) -> None:
    """Test grid sampling agrees with whole-trajectory evolution."""
    traj = sample_trajectory(three_state_spec, 2, 8.0, seed=9)
    spin = BlochVector.along("+y")
    grid = np.linspace(0.0, 8.0, 33)

    series = bloch_series(traj, spin, three_state_spec.omegas, grid)

    assert_allclose(series[0], spin.as_array())
    assert_allclose(series[-1], evolve_bloch(traj, spin, three_state_spec.omegas).as_array(), atol=1e-12)
    assert_allclose(np.linalg.norm(series, axis=1), np.ones(33))


def test_ensemble_rejects_single_trajectory(three_state_spec: FluctuatorSpec) -> None:
    """Test the standard error needs two trajectories."""
    with pytest.raises(InvalidStateError):
        ensemble_average(
            three_state_spec, BlochVector.along("+x"), Occupation.GROUND_ONLY, 1, [0.0, 1.0], 0
        )


def test_ensemble_independent_of_mapper(three_state_spec: FluctuatorSpec) -> None:
    """Test results do not depend on how chunks are scheduled."""

    def reversed_mapper(fn: Callable[[Any], Any], items: Any) -> list[Any]:
        tasks = list(items)
        results = [fn(task) for task in reversed(tasks)]
        return results[::-1]

    args = (three_state_spec, BlochVector.along("+x"), Occupation.STATIONARY, 1200, np.linspace(0, 4, 9), 42)
    plain = ensemble_average(*args)
    shuffled = ensemble_average(*args, mapper=reversed_mapper)

    assert_array_equal(plain.mean, shuffled.mean)
    assert_array_equal(plain.stderr, shuffled.stderr)
    assert plain.n_trajectories == 1200


def test_ensemble_static_environment_has_no_spread() -> None:
    """Test identical trajectories give the exact rotation with zero error."""
    omega = PrecessionVector(0.0, 0.0, 2.0)
    spec = FluctuatorSpec.single_state(omega)
    grid = np.linspace(0.0, 2.0, 5)

    result = ensemble_average(spec, BlochVector.along("+x"), Occupation.GROUND_ONLY, 10, grid, 1)

    for t, mean in zip(grid, result.mean, strict=True):
        assert_allclose(mean, rotate_bloch([1.0, 0.0, 0.0], omega.as_array(), t), atol=1e-12)
    assert_allclose(result.stderr, np.zeros_like(result.stderr), atol=1e-12)


@pytest.mark.slow
def test_monte_carlo_matches_master_equation(
    random_spec: Callable[..., FluctuatorSpec],
) -> None:
    """Test the trajectory average agrees with the exact solution within 4 standard errors."""
    grid = np.linspace(0.0, 4.0, 5)
    spin = BlochVector.along("+x")
    for index in range(3):
        spec = random_spec(3)
        exact = reduced_bloch_series(
            build_generator(spec), initial_joint_state(spec, spin, Occupation.STATIONARY), grid
        )
        result = ensemble_average(spec, spin, Occupation.STATIONARY, 10000, grid, seed=index)

        deviation = np.abs(result.mean - exact)[1:] / result.stderr[1:]
        assert np.max(deviation) <= 4.0
