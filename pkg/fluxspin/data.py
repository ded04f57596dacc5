"""Result containers shared by the compute modules and the command layer."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Any, NamedTuple, TypeAlias

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from .fluctuator import FluctuatorSpec
    from .quantum import PrecessionVector

Mapper: TypeAlias = Callable[[Callable[[Any], Any], Iterable[Any]], Iterable[Any]]


class DecayMethod(StrEnum):
    """How a decay rate was obtained."""

    SPECTRAL = "spectral"
    TIME_DOMAIN_FIT = "time_domain_fit"


@dataclass(frozen=True)
class DecayAnalysis:
    """Decoherence rate and observed precession frequency."""

    gamma_decay: float
    omega_observed: float
    method: DecayMethod
    fit_residual: float = 0.0
    confidence: float | None = None
    eigenvalue: complex | None = None
    oscillating: bool = True


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Monte Carlo mean Bloch vector with per-component standard errors."""

    times: npt.NDArray[np.float64]
    mean: npt.NDArray[np.float64]
    stderr: npt.NDArray[np.float64]
    n_trajectories: int
    seed: int
    n_absorbed: int = 0


@dataclass(frozen=True)
class CrossoverPoint:
    """Decay rate at one differential precession frequency."""

    delta_omega: float
    gamma_decay: float
    gamma_asymptotic: float
    valid: bool = True
    error: str | None = None


@dataclass(frozen=True)
class CrossoverCurve:
    """Decay rate against differential precession frequency."""

    points: tuple[CrossoverPoint, ...]
    rate_scale: float

    @property
    def delta_omega(self) -> npt.NDArray[np.float64]:
        """Scan abscissa."""
        return np.array([p.delta_omega for p in self.points])

    @property
    def gamma_decay(self) -> npt.NDArray[np.float64]:
        """Exact decay rates (NaN for invalid points)."""
        return np.array([p.gamma_decay for p in self.points])

    @property
    def valid_fraction(self) -> float:
        """Share of points that were computed."""
        return sum(p.valid for p in self.points) / len(self.points) if self.points else 1.0


@dataclass(frozen=True)
class PreparationStats:
    """Realization statistics for one initial spin preparation."""

    gamma_mean: float
    gamma_std: float
    omega_mean: float
    omega_std: float


@dataclass(frozen=True)
class SweepRow:
    """Ensemble statistics at one ground-state precession frequency."""

    omega_g: float
    gamma_mean: float
    gamma_std: float
    shift_mean: float
    shift_std: float
    photons_scattered: float
    preparations: dict[str, PreparationStats] = field(default_factory=dict)
    n_valid: int = 0
    n_realizations: int = 0
    errors: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        """True when every realization was analyzed."""
        return self.n_valid == self.n_realizations


@dataclass(frozen=True)
class SweepResult:
    """Ensemble sweep against omega_g; Gamma values include the reported offset."""

    rows: tuple[SweepRow, ...]
    gamma_rad: float
    gamma0: float
    gamma_dark: float
    occupation: str

    @property
    def valid_fraction(self) -> float:
        """Share of (omega_g, realization) cells that were analyzed."""
        total = sum(row.n_realizations for row in self.rows)
        return sum(row.n_valid for row in self.rows) / total if total else 1.0


class AnisotropyRates(NamedTuple):
    """Decay rates of spins prepared along x and along z."""

    gamma_x: float
    gamma_z: float


@dataclass(frozen=True, eq=False)
class SweetSpotResult:
    """Compensating field and the decoherence left after applying it."""

    compensation: PrecessionVector
    residual_gamma: float
    uncompensated_gamma: float
    compensable: bool
    compensated_spec: FluctuatorSpec
    excited_states: tuple[int, ...]


@dataclass(frozen=True)
class SimulationSample:
    """Reduced Bloch vector and state populations at one time."""

    t_us: float
    bloch: tuple[float, float, float]
    populations: tuple[float, ...]


@dataclass(frozen=True)
class ValidationSample:
    """Master-equation and Monte Carlo Bloch vectors at one time."""

    t_us: float
    exact: tuple[float, float, float]
    sampled: tuple[float, float, float]
    stderr: tuple[float, float, float]

    @property
    def deviation(self) -> tuple[float, float, float]:
        """Componentwise |sampled - exact| in standard errors."""
        values = []
        for exact, sampled, error in zip(self.exact, self.sampled, self.stderr, strict=True):
            difference = abs(sampled - exact)
            if error > 0.0:
                values.append(difference / error)
            else:
                # every trajectory agrees, so only round-off is tolerated
                values.append(0.0 if difference <= 1e-9 else float("inf"))
        return (values[0], values[1], values[2])


@dataclass(frozen=True)
class StateCompensation:
    """Precession vector of one state before and after compensation."""

    label: str
    excited: bool
    before: tuple[float, float, float]
    after: tuple[float, float, float]
