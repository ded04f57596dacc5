"""Exact solution of the joint spin-fluctuator master equation.

The joint state stacks the N vectorized conditional density matrices into
one 4N vector; its generator has diagonal blocks ``L_i - r_ii * 1`` and
off-diagonal blocks ``r_ij * 1``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property

import numpy as np
import numpy.typing as npt
from scipy.linalg import block_diag, eig, expm

from .const import (
    CHECKPOINT_TOLERANCE,
    CONDITION_LIMIT,
    DEFAULT_GRID_DECAY_TIMES,
    DEFAULT_GRID_POINTS,
    DEFAULT_GRID_SWITCHING_TIMES,
    HERMITICITY_TOLERANCE,
    TRACE_TOLERANCE,
)
from .exceptions import (
    FluxspinError,
    InvalidStateError,
    InvalidTimeGridError,
    NumericalDegeneracyError,
)
from .fluctuator import (
    FluctuatorSpec,
    asymptotic_rates,
    classical_generator,
    exit_rates,
    stationary_distribution,
    validate_probabilities,
)
from .quantum import (
    BlochVector,
    ComplexArray,
    DensityMatrix,
    FloatArray,
    bloch_from_density,
    density_from_bloch,
    liouvillian,
)

_LOGGER = logging.getLogger(__name__)

BLOCK: int = 4


class Occupation(StrEnum):
    """Initial occupation of the fluctuator states."""

    GROUND_ONLY = "ground_only"
    STATIONARY = "stationary"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class JointState:
    """Conditional density matrices, one per fluctuator state."""

    rhos: tuple[DensityMatrix, ...]
    time: float = 0.0

    @property
    def n_states(self) -> int:
        """Number of fluctuator states."""
        return len(self.rhos)

    def as_vector(self) -> ComplexArray:
        """Stacked vectorized form of length 4N."""
        return np.concatenate([rho.as_vector() for rho in self.rhos])

    @classmethod
    def from_vector(cls, vector: npt.ArrayLike, time: float = 0.0) -> JointState:
        """Rebuild from the stacked form, validating every block."""
        blocks = np.asarray(vector, dtype=np.complex128).reshape(-1, BLOCK)
        return cls(
            tuple(DensityMatrix.from_vector(block, HERMITICITY_TOLERANCE) for block in blocks),
            time,
        )


@dataclass(frozen=True)
class Eigensystem:
    """Right eigenpairs of a generator."""

    values: ComplexArray
    vectors: ComplexArray
    condition: float


@dataclass(frozen=True, eq=False)
class Generator:
    """4N x 4N generator; the eigendecomposition is computed once and cached.

    ``omegas`` holds the N x 3 precession vectors of the coherent blocks.
    """

    matrix: ComplexArray
    n_states: int
    omegas: FloatArray

    @cached_property
    def eigensystem(self) -> Eigensystem:
        """Eigenvalues, eigenvectors and the eigenvector condition number."""
        values, vectors = eig(self.matrix)
        condition = float(np.linalg.cond(vectors))
        if not math.isfinite(condition):
            condition = math.inf
        return Eigensystem(values, vectors, condition)


@dataclass(frozen=True)
class SpectralModes:
    """Eigenpairs sorted by |Re lambda| with the initial-state overlaps."""

    eigenvalues: ComplexArray
    vectors: ComplexArray
    overlaps: ComplexArray

    def __len__(self) -> int:
        return len(self.eigenvalues)


def build_generator(spec: FluctuatorSpec) -> Generator:
    """Assemble the joint generator of a fluctuator model."""
    classical = np.kron(classical_generator(spec), np.eye(BLOCK))
    coherent = block_diag(*(liouvillian(omega) for omega in spec.omegas))
    return Generator(classical + coherent, spec.n_states, spec.omega_array())


def initial_joint_state(
    spec: FluctuatorSpec,
    spin: BlochVector,
    occupation: Occupation = Occupation.GROUND_ONLY,
    probabilities: npt.ArrayLike | None = None,
) -> JointState:
    """Product of a fluctuator occupation and a spin state."""
    p = occupation_probabilities(spec, occupation, probabilities)
    if spin.weight <= 0.0:
        raise InvalidStateError(
            translation_key="unphysical_bloch",
            translation_placeholders={"length": spin.norm, "weight": spin.weight},
        )
    rho = density_from_bloch(spin).matrix / spin.weight
    return JointState(tuple(DensityMatrix(p_i * rho) for p_i in p))


def occupation_probabilities(
    spec: FluctuatorSpec,
    occupation: Occupation,
    probabilities: npt.ArrayLike | None = None,
) -> FloatArray:
    """Resolve an occupation mode into a probability vector."""
    if occupation is Occupation.GROUND_ONLY:
        p = np.zeros(spec.n_states)
        p[0] = 1.0
        return p
    if occupation is Occupation.STATIONARY:
        return stationary_distribution(spec).p
    if probabilities is None:
        raise InvalidStateError(translation_placeholders={"reason": "custom occupation needs p"})
    return validate_probabilities(probabilities, spec.n_states)


def populations(state: JointState) -> FloatArray:
    """Occupation probabilities tr(rho_i)."""
    return np.array([rho.trace for rho in state.rhos])


def reduce(state: JointState) -> DensityMatrix:
    """Spin density matrix: the sum of the conditional matrices."""
    total = np.sum([rho.matrix for rho in state.rhos], axis=0)
    trace = float(np.real(np.trace(total)))
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise NumericalDegeneracyError(
            translation_key="trace_drift", translation_placeholders={"trace": trace}
        )
    return DensityMatrix(total)


def _validate_times(times: Sequence[float] | FloatArray) -> FloatArray:
    grid = np.asarray(times, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidTimeGridError(translation_placeholders={"reason": "empty or not 1-D"})
    if not np.all(np.isfinite(grid)) or grid[0] < 0.0:
        raise InvalidTimeGridError(translation_placeholders={"reason": "negative or non-finite"})
    if np.any(np.diff(grid) < 0.0):
        raise InvalidTimeGridError(translation_placeholders={"reason": "not sorted ascending"})
    return grid


def propagate_vectors(
    g: Generator, x0: npt.ArrayLike, times: Sequence[float] | FloatArray
) -> ComplexArray:
    """exp(g t) x0 for every grid time; returns shape (len(times), 4N)."""
    grid = _validate_times(times)
    start = np.asarray(x0, dtype=np.complex128)
    system = g.eigensystem

    if system.condition > CONDITION_LIMIT:
        _LOGGER.debug(
            "Eigenbasis condition %.3g above %.0e, using matrix exponentials",
            system.condition,
            CONDITION_LIMIT,
        )
        return np.array([expm(g.matrix * t) @ start for t in grid])

    coefficients = np.linalg.solve(system.vectors, start)
    phases = np.exp(np.outer(grid, system.values))
    result = (phases * coefficients) @ system.vectors.T

    checkpoint = grid[-1]
    reference = expm(g.matrix * checkpoint) @ start
    difference = float(np.max(np.abs(result[-1] - reference)))
    if difference > CHECKPOINT_TOLERANCE:
        raise NumericalDegeneracyError(
            translation_key="solver_disagreement",
            translation_placeholders={"difference": difference, "time": checkpoint},
        )
    return result


def propagate(
    g: Generator, s0: JointState, times: Sequence[float] | FloatArray
) -> list[JointState]:
    """Joint state at every grid time."""
    grid = _validate_times(times)
    vectors = propagate_vectors(g, s0.as_vector(), grid)
    states: list[JointState] = []
    for t, vector in zip(grid, vectors, strict=True):
        state = JointState.from_vector(vector, float(t))
        total = float(populations(state).sum())
        if abs(total - 1.0) > TRACE_TOLERANCE:
            raise NumericalDegeneracyError(
                translation_key="trace_drift", translation_placeholders={"trace": total}
            )
        states.append(state)
    return states


def reduced_bloch_series(
    g: Generator, s0: JointState, times: Sequence[float] | FloatArray
) -> FloatArray:
    """Reduced Bloch vector (sx, sy, sz) at every grid time."""
    return np.array(
        [bloch_from_density(reduce(state)).as_array() for state in propagate(g, s0, times)]
    )


def spectral_modes(g: Generator, s0: JointState) -> SpectralModes:
    """Eigenmodes of the generator with the overlaps of the initial state."""
    system = g.eigensystem
    if system.condition > CONDITION_LIMIT:
        raise NumericalDegeneracyError(
            translation_placeholders={"condition": system.condition, "limit": CONDITION_LIMIT}
        )
    overlaps = np.linalg.solve(system.vectors, s0.as_vector())
    order = np.argsort(np.abs(system.values.real), kind="stable")
    return SpectralModes(system.values[order], system.vectors[:, order], overlaps[order])


def default_time_grid(
    spec: FluctuatorSpec,
    points: int = DEFAULT_GRID_POINTS,
    switching_times: float = DEFAULT_GRID_SWITCHING_TIMES,
) -> FloatArray:
    """Grid over [0, min(10 / Gamma_est, switching_times / r_max)] for decay analysis."""
    candidates: list[float] = []
    rate_scale = float(np.max(exit_rates(spec)))
    if rate_scale > 0.0:
        candidates.append(switching_times / rate_scale)
    if spec.n_states == 2:
        try:
            estimate = asymptotic_rates(spec).gamma_2
        except FluxspinError:
            estimate = 0.0
        if estimate > 0.0:
            candidates.append(DEFAULT_GRID_DECAY_TIMES / estimate)
    if not candidates:
        fastest = max(omega.norm for omega in spec.omegas)
        candidates.append(100.0 * 2.0 * math.pi / fastest if fastest > 0.0 else 1.0)
    return np.linspace(0.0, min(candidates), points)
