"""Classical N-state fluctuator: rates, stationary occupation and averages."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.linalg import expm, null_space

from .const import PROBABILITY_TOLERANCE
from .exceptions import (
    InvalidModelError,
    InvalidStateError,
    NonErgodicError,
    NotSupportedError,
    ZeroRatesError,
)
from .quantum import FloatArray, PrecessionVector

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FluctuatorSpec:
    """N-state fluctuator with one precession vector per state.

    ``rates[i, j]`` is the transition rate from state j to state i; the
    diagonal is not stored (zeroed on construction).
    """

    rates: FloatArray
    omegas: tuple[PrecessionVector, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        """Validate the model."""
        rates = np.array(self.rates, dtype=np.float64)
        if rates.ndim != 2 or rates.shape[0] != rates.shape[1] or rates.shape[0] < 1:
            raise InvalidModelError(
                translation_placeholders={"reason": f"shape {rates.shape} is not square"}
            )
        np.fill_diagonal(rates, 0.0)
        if not np.all(np.isfinite(rates)):
            raise InvalidModelError(translation_placeholders={"reason": "non-finite entry"})
        if np.any(rates < 0.0):
            raise InvalidModelError(translation_placeholders={"reason": "negative rate"})
        rates.flags.writeable = False
        object.__setattr__(self, "rates", rates)

        omegas = tuple(
            w if isinstance(w, PrecessionVector) else PrecessionVector.from_array(w)
            for w in self.omegas
        )
        if len(omegas) != rates.shape[0]:
            raise InvalidModelError(
                translation_key="omega_count",
                translation_placeholders={"expected": rates.shape[0], "actual": len(omegas)},
            )
        object.__setattr__(self, "omegas", omegas)

        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != rates.shape[0]:
                raise InvalidModelError(
                    translation_key="label_count",
                    translation_placeholders={"expected": rates.shape[0], "actual": len(labels)},
                )
            object.__setattr__(self, "labels", labels)

    @classmethod
    def two_state(
        cls,
        r_ba: float,
        r_ab: float,
        omega_a: PrecessionVector,
        omega_b: PrecessionVector,
    ) -> FluctuatorSpec:
        """Build |a> <-> |b> with r_ba the a->b rate and r_ab the b->a rate."""
        rates = np.array([[0.0, r_ab], [r_ba, 0.0]])
        return cls(rates, (omega_a, omega_b), ("a", "b"))

    @classmethod
    def single_state(cls, omega: PrecessionVector) -> FluctuatorSpec:
        """Build a static (one-state) environment."""
        return cls(np.zeros((1, 1)), (omega,))

    @property
    def n_states(self) -> int:
        """Number of fluctuator states."""
        return int(self.rates.shape[0])

    @property
    def state_labels(self) -> tuple[str, ...]:
        """Labels, defaulting to 1-based state numbers."""
        return self.labels or tuple(str(i + 1) for i in range(self.n_states))

    def omega_array(self) -> FloatArray:
        """Precession vectors as an (N, 3) array."""
        return np.array([w.as_array() for w in self.omegas]).reshape(self.n_states, 3)


class StationaryDistribution(NamedTuple):
    """Stationary occupation probabilities."""

    p: FloatArray


class AsymptoticRates(NamedTuple):
    """Fast-fluctuator decoherence rates (1/us)."""

    gamma_1: float
    gamma_phi: float
    gamma_2: float


def exit_rates(spec: FluctuatorSpec) -> FloatArray:
    """Total rate r_jj out of each state j."""
    return spec.rates.sum(axis=0)


def classical_generator(spec: FluctuatorSpec) -> FloatArray:
    """Generator of the population master equation dp/dt = Q p."""
    return spec.rates - np.diag(exit_rates(spec))


def stationary_distribution(spec: FluctuatorSpec) -> StationaryDistribution:
    """Return the unique stationary occupation of an irreducible chain."""
    if spec.n_states == 1:
        return StationaryDistribution(np.ones(1))
    if not np.any(spec.rates > 0.0):
        raise ZeroRatesError(translation_placeholders={"n_states": spec.n_states})

    kernel = null_space(classical_generator(spec))
    if kernel.shape[1] != 1:
        raise NonErgodicError(translation_placeholders={"dimension": kernel.shape[1]})

    p = np.clip(kernel[:, 0] / kernel[:, 0].sum(), 0.0, None)
    return StationaryDistribution(p / p.sum())


def validate_probabilities(p: npt.ArrayLike, n_states: int) -> FloatArray:
    """Check an occupation vector and return it as a float array."""
    probabilities = np.asarray(p, dtype=np.float64)
    if probabilities.shape != (n_states,):
        raise InvalidStateError(
            translation_placeholders={"reason": f"expected {n_states} entries"}
        )
    if not np.all(np.isfinite(probabilities)) or np.any(probabilities < -PROBABILITY_TOLERANCE):
        raise InvalidStateError(translation_placeholders={"reason": "negative or non-finite entry"})
    if abs(probabilities.sum() - 1.0) > 1e3 * PROBABILITY_TOLERANCE:
        raise InvalidStateError(
            translation_placeholders={"reason": f"sum is {probabilities.sum()}"}
        )
    return np.clip(probabilities, 0.0, None)


def classical_populations(
    spec: FluctuatorSpec, p0: npt.ArrayLike, times: Sequence[float] | FloatArray
) -> FloatArray:
    """Solve the population master equation; returns shape (len(times), N)."""
    q = classical_generator(spec)
    start = validate_probabilities(p0, spec.n_states)
    return np.array([expm(q * t) @ start for t in np.asarray(times, dtype=np.float64)])


def average_precession(spec: FluctuatorSpec) -> PrecessionVector:
    """Occupation-weighted average precession vector."""
    p = stationary_distribution(spec).p
    return PrecessionVector.from_array(p @ spec.omega_array())


def compose(a: FluctuatorSpec, b: FluctuatorSpec) -> FluctuatorSpec:
    """Merge two independent fluctuators into one product-state fluctuator.

    Composite state (i, j) has index ``i * b.n_states + j``; its precession
    vector is the sum of the factor vectors.
    """
    identity_a = np.eye(a.n_states)
    identity_b = np.eye(b.n_states)
    rates = np.kron(a.rates, identity_b) + np.kron(identity_a, b.rates)
    omegas = tuple(wa + wb for wa in a.omegas for wb in b.omegas)
    labels = tuple(f"{la}|{lb}" for la in a.state_labels for lb in b.state_labels)
    _LOGGER.debug("Composed %d x %d fluctuator states", a.n_states, b.n_states)
    return FluctuatorSpec(rates, omegas, labels)


def asymptotic_rates(spec: FluctuatorSpec) -> AsymptoticRates:
    """Second-order (motional narrowing) rates of a two-state fluctuator.

    Gamma_phi = p_a p_b dw_par^2 / r_tot
    Gamma_1   = p_a p_b dw_perp^2 r_tot / (r_tot^2 + |<w>|^2)
    Gamma_2   = Gamma_phi + Gamma_1 / 2
    """
    if spec.n_states != 2:
        raise NotSupportedError(translation_placeholders={"n_states": spec.n_states})

    p_a, p_b = stationary_distribution(spec).p
    r_tot = float(exit_rates(spec).sum())
    mean = average_precession(spec).as_array()
    delta = spec.omegas[0].as_array() - spec.omegas[1].as_array()

    mean_norm = float(np.linalg.norm(mean))
    delta_norm = float(np.linalg.norm(delta))
    if delta_norm == 0.0:
        return AsymptoticRates(0.0, 0.0, 0.0)
    # zero mean field: the fluctuation itself sets the quantization axis
    axis = mean / mean_norm if mean_norm > 0.0 else delta / delta_norm

    parallel = float(delta @ axis)
    perpendicular_sq = max(delta_norm**2 - parallel**2, 0.0)
    variance = p_a * p_b

    gamma_phi = variance * parallel**2 / r_tot
    gamma_1 = variance * perpendicular_sq * r_tot / (r_tot**2 + mean_norm**2)
    return AsymptoticRates(gamma_1, gamma_phi, gamma_phi + 0.5 * gamma_1)
