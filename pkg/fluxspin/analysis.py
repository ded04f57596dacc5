"""Decoherence rate and observed precession frequency from spectra or time series."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.optimize import curve_fit

from .const import (
    AMPLITUDE_FLOOR,
    MIN_FIT_DECAY_TIMES,
    MIN_FIT_PERIODS,
    MIN_FIT_SAMPLES,
    POOR_FIT_THRESHOLD,
    SPECTRAL_TOLERANCE,
)
from .data import CrossoverCurve, CrossoverPoint, DecayAnalysis, DecayMethod, Mapper
from .exceptions import (
    FluxspinError,
    InsufficientDataError,
    InvalidModelError,
    PoorFitError,
)
from .fluctuator import FluctuatorSpec, asymptotic_rates
from .propagator import (
    BLOCK,
    Generator,
    JointState,
    Occupation,
    build_generator,
    initial_joint_state,
    populations,
    spectral_modes,
)
from .quantum import BlochVector, FloatArray, PrecessionVector, bloch_components

_LOGGER = logging.getLogger(__name__)

GAMMA_CANDIDATES: int = 48
OMEGA_CANDIDATES: int = 41


def _mode_weights(
    g: Generator, s0: JointState
) -> tuple[npt.NDArray[np.complex128], FloatArray, npt.NDArray[np.complex128]]:
    modes = spectral_modes(g, s0)
    reduced = modes.vectors.reshape(g.n_states, BLOCK, -1).sum(axis=0)
    content = np.array([bloch_components(reduced[:, k]) for k in range(len(modes))])
    weights = np.abs(modes.overlaps) * np.linalg.norm(content, axis=1)
    return modes.eigenvalues, weights, content


def _quantization_axis(g: Generator, s0: JointState) -> FloatArray | None:
    """Average precession axis of the initial occupation, else the dominant field direction."""
    scale = max(1.0, float(np.max(np.linalg.norm(g.omegas, axis=1))))
    mean = populations(s0) @ g.omegas
    length = float(np.linalg.norm(mean))
    if length > SPECTRAL_TOLERANCE * scale:
        return mean / length
    if not np.any(g.omegas):
        return None
    _, _, vt = np.linalg.svd(g.omegas)
    return vt[0]


def _transverse(
    content: npt.NDArray[np.complex128], axis: FloatArray | None
) -> npt.NDArray[np.bool_]:
    if axis is None:
        return np.ones(len(content), dtype=bool)
    parallel = content @ axis
    perpendicular = np.linalg.norm(content - np.outer(parallel, axis), axis=1)
    return perpendicular > np.abs(parallel)


def extract_spectral(g: Generator, s0: JointState) -> DecayAnalysis:
    """Pick the slowest mode that carries transverse spin signal of ``s0``.

    Modes are weighted by |overlap| times the Bloch content of their reduced
    spin part. A mode is transverse when that content lies mostly off the
    quantization axis; longitudinal modes are used only when no transverse
    mode carries weight. ``omega_observed`` is |Im lambda| of the chosen
    mode, zero for a real one.
    """
    eigenvalues, weights, content = _mode_weights(g, s0)
    if not weights.size or weights.max() == 0.0:
        return DecayAnalysis(0.0, 0.0, DecayMethod.SPECTRAL, oscillating=False)

    relevant = weights > SPECTRAL_TOLERANCE * weights.max()
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    tolerance = SPECTRAL_TOLERANCE * scale

    candidates = np.flatnonzero(relevant & _transverse(content, _quantization_axis(g, s0)))
    if not candidates.size:
        candidates = np.flatnonzero(relevant & (eigenvalues.real < -tolerance))
        if not candidates.size:
            _LOGGER.debug("No decaying mode carries the spin signal")
            return DecayAnalysis(0.0, 0.0, DecayMethod.SPECTRAL, oscillating=False)

    slowest = float(np.min(np.abs(eigenvalues.real[candidates])))
    tied = candidates[np.abs(eigenvalues.real[candidates]) - slowest <= tolerance]
    chosen = int(tied[np.argmax(weights[tied])])
    value = complex(eigenvalues[chosen])
    oscillating = abs(value.imag) > tolerance
    return DecayAnalysis(
        gamma_decay=max(-value.real, 0.0),
        omega_observed=abs(value.imag) if oscillating else 0.0,
        method=DecayMethod.SPECTRAL,
        eigenvalue=value,
        oscillating=oscillating,
    )


def _damped_cosine(
    t: FloatArray, amplitude: float, gamma: float, omega: float, phase: float, offset: float
) -> FloatArray:
    return amplitude * np.exp(-gamma * t) * np.cos(omega * t + phase) + offset


def _transverse_direction(first: FloatArray, quantization_axis: npt.ArrayLike) -> FloatArray:
    axis = np.asarray(quantization_axis, dtype=np.float64)
    length = float(np.linalg.norm(axis))
    if length == 0.0:
        direction = first
    else:
        axis = axis / length
        direction = first - (first @ axis) * axis
        if np.linalg.norm(direction) <= AMPLITUDE_FLOOR:
            # start along the axis: any perpendicular direction will do
            direction = np.cross(axis, np.eye(3)[int(np.argmin(np.abs(axis)))])
    norm = float(np.linalg.norm(direction))
    if norm <= AMPLITUDE_FLOOR:
        return np.eye(3)[0]
    return direction / norm


def _seed_frequency(times: FloatArray, signal: FloatArray) -> float:
    step = float(np.mean(np.diff(times)))
    spectrum = np.abs(np.fft.rfft(signal - signal.mean()))
    frequencies = np.fft.rfftfreq(signal.size, d=step)
    return 2.0 * math.pi * float(frequencies[int(np.argmax(spectrum))])


def _linear_fit(
    times: FloatArray, signal: FloatArray, gamma: float, omega: float
) -> tuple[float, FloatArray]:
    envelope = np.exp(-gamma * times)
    design = np.column_stack(
        [envelope * np.cos(omega * times), envelope * np.sin(omega * times), np.ones_like(times)]
    )
    coefficients, *_ = np.linalg.lstsq(design, signal, rcond=None)
    residual = signal - design @ coefficients
    return float(residual @ residual), coefficients


def fit_time_domain(
    grid: Sequence[float] | FloatArray,
    bloch_series: npt.ArrayLike,
    quantization_axis: npt.ArrayLike | PrecessionVector,
) -> DecayAnalysis:
    """Fit the transverse Bloch component to A exp(-Gamma t) cos(omega t + phi) + C.

    A variable-projection grid search seeded by the spectral peak is refined
    with ``scipy.optimize.curve_fit``.
    """
    times = np.asarray(grid, dtype=np.float64)
    series = np.asarray(bloch_series, dtype=np.float64)
    if isinstance(quantization_axis, PrecessionVector):
        quantization_axis = quantization_axis.as_array()
    if times.ndim != 1 or series.shape != (times.size, 3):
        raise InsufficientDataError(
            translation_placeholders={"reason": f"series shape {series.shape} for {times.size} times"}
        )
    if times.size < MIN_FIT_SAMPLES:
        raise InsufficientDataError(
            translation_placeholders={"reason": f"{times.size} samples, need {MIN_FIT_SAMPLES}"}
        )

    signal = series @ _transverse_direction(series[0], quantization_axis)
    if float(np.ptp(signal)) <= AMPLITUDE_FLOOR * max(1.0, float(np.max(np.abs(signal)))):
        return DecayAnalysis(0.0, 0.0, DecayMethod.TIME_DOMAIN_FIT, oscillating=False)

    span = float(times[-1] - times[0])
    t = times - times[0]
    resolution = 2.0 * math.pi / span
    seed = _seed_frequency(t, signal)
    omegas = np.linspace(max(seed - 2.0 * resolution, 0.0), seed + 2.0 * resolution, OMEGA_CANDIDATES)
    gammas = np.concatenate(([0.0], np.geomspace(0.05 / span, 100.0 / span, GAMMA_CANDIDATES - 1)))

    best = (math.inf, 0.0, 0.0, np.zeros(3))
    for gamma in gammas:
        for omega in omegas:
            cost, coefficients = _linear_fit(t, signal, float(gamma), float(omega))
            if cost < best[0]:
                best = (cost, float(gamma), float(omega), coefficients)
    _, gamma, omega, (a, b, offset) = best
    amplitude = math.hypot(a, b)
    phase = math.atan2(-b, a)

    confidence: float | None = None
    try:
        popt, pcov = curve_fit(
            _damped_cosine,
            t,
            signal,
            p0=[amplitude, gamma, omega, phase, offset],
            bounds=([-np.inf, 0.0, 0.0, -np.inf, -np.inf], np.inf),
        )
    except (RuntimeError, ValueError) as err:
        _LOGGER.debug("Local refinement failed, keeping grid estimate: %s", err)
    else:
        amplitude, gamma, omega, phase, offset = (float(p) for p in popt)
        variance = float(pcov[1, 1])
        confidence = math.sqrt(variance) if math.isfinite(variance) and variance >= 0 else None

    model = _damped_cosine(t, amplitude, gamma, omega, phase, offset)
    rms = float(np.sqrt(np.mean((signal - model) ** 2)))
    residual = rms / abs(amplitude) if amplitude != 0.0 else math.inf
    if residual > POOR_FIT_THRESHOLD:
        raise PoorFitError(translation_placeholders={"residual": f"{residual:.3g}"})

    periods = omega * span / (2.0 * math.pi)
    if periods < MIN_FIT_PERIODS and gamma * span < MIN_FIT_DECAY_TIMES:
        raise InsufficientDataError(
            translation_placeholders={
                "reason": f"{periods:.2g} periods and {gamma * span:.2g} decay times covered"
            }
        )
    return DecayAnalysis(
        gamma_decay=gamma,
        omega_observed=omega,
        method=DecayMethod.TIME_DOMAIN_FIT,
        fit_residual=residual,
        confidence=confidence,
    )


@dataclass(frozen=True, kw_only=True)
class CrossoverTemplate:
    """Two-state fluctuator whose precession vectors differ by a scanned amount.

    For a differential frequency ``dw`` the states get
    ``w_a = mean_omega + p_b dw n`` and ``w_b = mean_omega - p_a dw n``, which
    keeps the occupation-weighted average fixed at ``mean_omega``.
    """

    rate_ba: float = 0.5
    rate_ab: float = 0.5
    mean_omega: PrecessionVector = field(default_factory=PrecessionVector.zero)
    direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    spin: str | tuple[float, float, float] = "+x"

    def __post_init__(self) -> None:
        """Validate rates and direction."""
        if not (self.rate_ba > 0.0 and self.rate_ab > 0.0):
            raise InvalidModelError(
                translation_placeholders={"reason": "both template rates must be positive"}
            )
        if not np.linalg.norm(np.asarray(self.direction, dtype=np.float64)) > 0.0:
            raise InvalidModelError(
                translation_key="invalid_vector",
                translation_placeholders={"vector": self.direction},
            )

    @property
    def rate_scale(self) -> float:
        """Total switching rate r_tot."""
        return self.rate_ba + self.rate_ab

    def build(self, delta_omega: float) -> FluctuatorSpec:
        """Two-state fluctuator at one differential precession frequency."""
        p_a = self.rate_ab / self.rate_scale
        p_b = self.rate_ba / self.rate_scale
        unit = np.asarray(self.direction, dtype=np.float64)
        unit = unit / np.linalg.norm(unit)
        mean = self.mean_omega.as_array()
        return FluctuatorSpec.two_state(
            self.rate_ba,
            self.rate_ab,
            PrecessionVector.from_array(mean + p_b * delta_omega * unit),
            PrecessionVector.from_array(mean - p_a * delta_omega * unit),
        )


def _crossover_point(task: tuple[CrossoverTemplate, float]) -> CrossoverPoint:
    template, delta_omega = task
    try:
        spec = template.build(delta_omega)
        asymptotic = asymptotic_rates(spec).gamma_2
        s0 = initial_joint_state(spec, BlochVector.along(template.spin), Occupation.STATIONARY)
        analysis = extract_spectral(build_generator(spec), s0)
    except FluxspinError as err:
        _LOGGER.warning("Crossover point dw=%g failed: %s", delta_omega, err.message)
        return CrossoverPoint(delta_omega, math.nan, math.nan, valid=False, error=err.translation_key)
    return CrossoverPoint(delta_omega, analysis.gamma_decay, asymptotic)


def crossover_scan(
    base_spec_template: CrossoverTemplate,
    delta_omega_grid: Sequence[float] | FloatArray,
    *,
    mapper: Mapper = map,
) -> CrossoverCurve:
    """Spectral decay rate against the differential precession frequency."""
    grid = np.asarray(delta_omega_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidModelError(
            translation_key="invalid_grid", translation_placeholders={"reason": "empty grid"}
        )
    if not np.all(np.isfinite(grid)) or grid[0] < 0.0 or np.any(np.diff(grid) <= 0.0):
        raise InvalidModelError(
            translation_key="invalid_grid",
            translation_placeholders={"reason": "must be finite, non-negative, strictly increasing"},
        )
    tasks = [(base_spec_template, float(dw)) for dw in grid]
    points = tuple(mapper(_crossover_point, tasks))
    return CrossoverCurve(points, base_spec_template.rate_scale)
