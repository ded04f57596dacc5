"""Spin-1/2 primitives: precession vectors, density matrices and Liouvillians.

Conventions used throughout the package:

* time in microseconds, rates in 1/us, angular frequencies in rad/us;
* spin operators are I = sigma / 2, so a Bloch vector precesses about a
  precession vector ``v`` at angular frequency ``|v|`` (``ds/dt = v x s``);
* density matrices are vectorized row by row, ``(rho_11, rho_12, rho_21,
  rho_22)``, which is ``numpy.ravel`` order.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import TypeAlias

import numpy as np
import numpy.typing as npt

from .const import HERMITICITY_TOLERANCE, ROUND_TRIP_TOLERANCE
from .exceptions import InvalidModelError, InvalidStateError

ComplexArray: TypeAlias = npt.NDArray[np.complex128]
FloatArray: TypeAlias = npt.NDArray[np.float64]
Superoperator: TypeAlias = ComplexArray

IDENTITY_2: ComplexArray = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class PrecessionVector:
    """Angular velocity of nuclear-spin precession in one fluctuator state."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        """Validate the components."""
        components = (self.x, self.y, self.z)
        if not all(math.isfinite(c) for c in components):
            raise InvalidModelError(
                translation_key="invalid_vector",
                translation_placeholders={"vector": components},
            )
        for name, value in zip(("x", "y", "z"), components, strict=True):
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_array(cls, values: Iterable[float]) -> PrecessionVector:
        """Build a vector from any three-element sequence."""
        items = [float(v) for v in values]
        if len(items) != 3:
            raise InvalidModelError(
                translation_key="invalid_vector",
                translation_placeholders={"vector": items},
            )
        return cls(*items)

    @classmethod
    def zero(cls) -> PrecessionVector:
        """Return the null vector."""
        return cls(0.0, 0.0, 0.0)

    def as_array(self) -> FloatArray:
        """Return the components as a float array."""
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @property
    def norm(self) -> float:
        """Larmor angular frequency."""
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    def dot(self, other: PrecessionVector) -> float:
        """Scalar product."""
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __add__(self, other: PrecessionVector) -> PrecessionVector:
        return PrecessionVector(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: PrecessionVector) -> PrecessionVector:
        return PrecessionVector(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, factor: float) -> PrecessionVector:
        return PrecessionVector(self.x * factor, self.y * factor, self.z * factor)

    __rmul__ = __mul__

    def __neg__(self) -> PrecessionVector:
        return PrecessionVector(-self.x, -self.y, -self.z)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2x2 spin density matrix, possibly sub-normalized.

    Hermiticity is re-imposed on construction; drift beyond the tolerance
    and negative eigenvalues are rejected.
    """

    matrix: ComplexArray
    tolerance: float = field(default=HERMITICITY_TOLERANCE, repr=False)

    def __post_init__(self) -> None:
        """Validate and symmetrize."""
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.shape != (2, 2) or not np.all(np.isfinite(matrix)):
            raise InvalidStateError(
                translation_key="not_hermitian",
                translation_placeholders={"drift": "malformed matrix"},
            )
        drift = float(np.max(np.abs(matrix - matrix.conj().T)))
        if drift > self.tolerance:
            raise InvalidStateError(
                translation_key="not_hermitian",
                translation_placeholders={"drift": drift},
            )
        matrix = 0.5 * (matrix + matrix.conj().T)
        lowest = float(np.linalg.eigvalsh(matrix)[0])
        if lowest < -self.tolerance:
            raise InvalidStateError(
                translation_key="not_positive",
                translation_placeholders={"eigenvalue": lowest},
            )
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_vector(
        cls, vector: npt.ArrayLike, tolerance: float = HERMITICITY_TOLERANCE
    ) -> DensityMatrix:
        """Build from the vectorized form (rho_11, rho_12, rho_21, rho_22)."""
        return cls(np.asarray(vector, dtype=np.complex128).reshape(2, 2), tolerance)

    def as_vector(self) -> ComplexArray:
        """Return the vectorized form (rho_11, rho_12, rho_21, rho_22)."""
        return self.matrix.ravel().copy()

    @property
    def trace(self) -> float:
        """Occupation weight of this (conditional) matrix."""
        return float(np.real(self.matrix[0, 0] + self.matrix[1, 1]))

    @property
    def eigenvalues(self) -> FloatArray:
        """Ascending eigenvalues."""
        return np.linalg.eigvalsh(self.matrix)

    def __add__(self, other: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(self.matrix + other.matrix, max(self.tolerance, other.tolerance))


@dataclass(frozen=True)
class BlochVector:
    """Bloch vector with the trace (weight) of its density matrix."""

    sx: float
    sy: float
    sz: float
    weight: float = 1.0

    _AXES = {
        "x": (1.0, 0.0, 0.0),
        "y": (0.0, 1.0, 0.0),
        "z": (0.0, 0.0, 1.0),
    }

    def __post_init__(self) -> None:
        """Validate the components."""
        values = (self.sx, self.sy, self.sz, self.weight)
        if not all(math.isfinite(v) for v in values):
            raise InvalidModelError(
                translation_key="invalid_vector",
                translation_placeholders={"vector": values},
            )

    @classmethod
    def along(cls, axis: str | Iterable[float]) -> BlochVector:
        """Return the pure state along an axis name ('+x', '-z', ...) or vector."""
        if isinstance(axis, str):
            sign = -1.0 if axis.startswith("-") else 1.0
            name = axis.lstrip("+-").lower()
            if name not in cls._AXES:
                raise InvalidModelError(
                    translation_key="invalid_vector",
                    translation_placeholders={"vector": axis},
                )
            direction = sign * np.array(cls._AXES[name])
        else:
            direction = np.asarray(list(axis), dtype=np.float64)
            length = float(np.linalg.norm(direction))
            if direction.shape != (3,) or not math.isfinite(length) or length == 0.0:
                raise InvalidModelError(
                    translation_key="invalid_vector",
                    translation_placeholders={"vector": direction.tolist()},
                )
            direction = direction / length
        return cls(float(direction[0]), float(direction[1]), float(direction[2]))

    @classmethod
    def from_array(cls, values: npt.ArrayLike, weight: float = 1.0) -> BlochVector:
        """Build from a three-element array."""
        sx, sy, sz = (float(v) for v in np.asarray(values, dtype=np.float64))
        return cls(sx, sy, sz, weight)

    def as_array(self) -> FloatArray:
        """Return (sx, sy, sz)."""
        return np.array([self.sx, self.sy, self.sz], dtype=np.float64)

    @property
    def norm(self) -> float:
        """Length of the Bloch vector."""
        return math.sqrt(self.sx**2 + self.sy**2 + self.sz**2)


def hamiltonian(v: PrecessionVector) -> ComplexArray:
    """Return H = v . sigma / 2."""
    return np.array(
        [
            [0.5 * v.z, 0.5 * complex(v.x, -v.y)],
            [0.5 * complex(v.x, v.y), -0.5 * v.z],
        ],
        dtype=np.complex128,
    )


def liouvillian(v: PrecessionVector) -> Superoperator:
    """Return L[v] = -i (H (x) 1 - 1 (x) H*) acting on the vectorized density matrix."""
    h = hamiltonian(v)
    return -1j * (np.kron(h, IDENTITY_2) - np.kron(IDENTITY_2, h.conj()))


def bloch_components(vector: npt.ArrayLike) -> ComplexArray:
    """Return (sx, sy, sz) of a vectorized operator; complex for non-Hermitian input."""
    rho = np.asarray(vector, dtype=np.complex128)
    return np.array(
        [
            rho[1] + rho[2],
            1j * (rho[1] - rho[2]),
            rho[0] - rho[3],
        ]
    )


def bloch_from_density(rho: DensityMatrix) -> BlochVector:
    """Map a density matrix to its Bloch vector."""
    s = np.real(bloch_components(rho.as_vector()))
    return BlochVector(float(s[0]), float(s[1]), float(s[2]), rho.trace)


def density_from_bloch(b: BlochVector) -> DensityMatrix:
    """Map a Bloch vector back to its density matrix."""
    if b.norm > b.weight + ROUND_TRIP_TOLERANCE:
        raise InvalidStateError(
            translation_key="unphysical_bloch",
            translation_placeholders={"length": b.norm, "weight": b.weight},
        )
    matrix = 0.5 * np.array(
        [
            [b.weight + b.sz, complex(b.sx, -b.sy)],
            [complex(b.sx, b.sy), b.weight - b.sz],
        ],
        dtype=np.complex128,
    )
    return DensityMatrix(matrix)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of the difference."""
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))


def rotation_matrix(omega: npt.ArrayLike, duration: float) -> FloatArray:
    """Rotation by angle |omega| * duration about omega (Rodrigues form)."""
    axis = np.asarray(omega, dtype=np.float64)
    rate = float(np.linalg.norm(axis))
    if rate == 0.0 or duration == 0.0:
        return np.eye(3)
    axis = axis / rate
    angle = rate * duration
    cross = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + math.sin(angle) * cross + (1.0 - math.cos(angle)) * (cross @ cross)


def rotate_bloch(s: npt.ArrayLike, omega: npt.ArrayLike, duration: float) -> FloatArray:
    """Precess a Bloch vector about omega for the given duration."""
    return rotation_matrix(omega, duration) @ np.asarray(s, dtype=np.float64)
