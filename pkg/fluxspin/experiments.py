"""NV-center scenarios: random excited-state ensembles, anisotropy and sweet spot."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .analysis import extract_spectral
from .const import (
    DEFAULT_GAMMA0_OFFSET,
    DEFAULT_GAMMA_DARK,
    DEFAULT_GAMMA_RAD,
    DEFAULT_N_REALIZATIONS,
    DEFAULT_N_STATES,
    DEFAULT_SIGMA_OMEGA_RATIO,
    MAX_FIG2_OMEGA_G,
    SPECTRAL_TOLERANCE,
)
from .data import (
    AnisotropyRates,
    DecayAnalysis,
    Mapper,
    PreparationStats,
    SweepResult,
    SweepRow,
    SweetSpotResult,
)
from .exceptions import FluxspinError, InvalidModelError, InvalidStateError
from .fluctuator import FluctuatorSpec
from .propagator import Occupation, build_generator, initial_joint_state
from .quantum import BlochVector, FloatArray, PrecessionVector
from .sampler import derive_seed

_LOGGER = logging.getLogger(__name__)

GROUND_AXIS: tuple[float, float, float] = (0.0, 1.0, 0.0)
PREPARATIONS: tuple[str, ...] = ("+x", "+z")


@dataclass(frozen=True, kw_only=True)
class EnsembleSpec:
    """Random excited-state ensemble of an optically driven NV center.

    ``gamma0_offset`` and ``gamma_dark`` are in units of ``gamma_rad``;
    ``excitation_rate`` defaults to ``gamma_rad``.
    """

    n_states: int = DEFAULT_N_STATES
    sigma_omega_ratio: float = DEFAULT_SIGMA_OMEGA_RATIO
    gamma_rad: float = DEFAULT_GAMMA_RAD
    excitation_rate: float | None = None
    n_realizations: int = DEFAULT_N_REALIZATIONS
    seed: int = 0
    occupation: Occupation = Occupation.GROUND_ONLY
    gamma0_offset: float = DEFAULT_GAMMA0_OFFSET
    gamma_dark: float = DEFAULT_GAMMA_DARK
    resample_per_omega: bool = False

    def __post_init__(self) -> None:
        """Validate the ensemble parameters."""
        if self.n_states < 2:
            reason = f"n_states={self.n_states}, need at least 2"
        elif not (self.gamma_rad > 0.0 and self.rate_in > 0.0):
            reason = "radiative and excitation rates must be positive"
        elif self.n_realizations < 1:
            reason = f"n_realizations={self.n_realizations}"
        elif not self.sigma_omega_ratio >= 0.0:
            reason = f"sigma_omega_ratio={self.sigma_omega_ratio}"
        elif self.occupation is Occupation.CUSTOM:
            reason = "custom occupation is not available for ensembles"
        else:
            return
        raise InvalidModelError(
            translation_key="invalid_ensemble", translation_placeholders={"reason": reason}
        )

    @property
    def rate_in(self) -> float:
        """Total excitation rate R."""
        return self.gamma_rad if self.excitation_rate is None else self.excitation_rate

    @property
    def gamma0(self) -> float:
        """Reported decoherence offset in 1/us."""
        return self.gamma0_offset * self.gamma_rad


def random_excited_spec(e: EnsembleSpec, omega_g: float, realization_index: int) -> FluctuatorSpec:
    """Ground state precessing about y plus N-1 randomly oriented excited states.

    The dimensionless draw depends only on (seed, realization) unless
    ``resample_per_omega`` is set, so one ensemble is rescaled across a grid.
    """
    if not omega_g > 0.0:
        raise InvalidModelError(
            translation_key="invalid_grid",
            translation_placeholders={"reason": f"omega_g={omega_g} must be positive"},
        )
    key: tuple[int, ...] = (realization_index,)
    if e.resample_per_omega:
        key += (int(np.float64(omega_g).view(np.uint64)),)
    draws = np.random.default_rng(derive_seed(e.seed, *key)).standard_normal((e.n_states - 1, 3))
    sigma = e.sigma_omega_ratio * omega_g

    rates = np.zeros((e.n_states, e.n_states))
    rates[1:, 0] = e.rate_in / (e.n_states - 1)
    rates[0, 1:] = e.gamma_rad
    omegas = (omega_g * PrecessionVector(*GROUND_AXIS),) + tuple(
        PrecessionVector.from_array(sigma * row) for row in draws
    )
    labels = ("g",) + tuple(f"e{k}" for k in range(1, e.n_states))
    return FluctuatorSpec(rates, omegas, labels)


def _analyze(spec: FluctuatorSpec, spin: str | FloatArray, occupation: Occupation) -> DecayAnalysis:
    s0 = initial_joint_state(spec, BlochVector.along(spin), occupation)
    return extract_spectral(build_generator(spec), s0)


@dataclass(frozen=True)
class _CellResult:
    omega_g: float
    realization: int
    analyses: dict[str, DecayAnalysis] | None
    error: str | None = None


def _fig2_cell(task: tuple[EnsembleSpec, float, int]) -> _CellResult:
    e, omega_g, realization = task
    try:
        spec = random_excited_spec(e, omega_g, realization)
        analyses = {spin: _analyze(spec, spin, e.occupation) for spin in PREPARATIONS}
    except FluxspinError as err:
        _LOGGER.warning(
            "Realization %d at omega_g=%g failed: %s", realization, omega_g, err.message
        )
        return _CellResult(omega_g, realization, None, err.translation_key)
    return _CellResult(omega_g, realization, analyses)


def _spread(values: FloatArray) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def _sweep_row(e: EnsembleSpec, omega_g: float, cells: Sequence[_CellResult]) -> SweepRow:
    valid = [cell.analyses for cell in cells if cell.analyses is not None]
    errors = tuple(cell.error for cell in cells if cell.error is not None)
    if not valid:
        nan = math.nan
        return SweepRow(
            omega_g, nan, nan, nan, nan, nan, n_valid=0, n_realizations=len(cells), errors=errors
        )

    gammas = np.array([[a[s].gamma_decay for s in PREPARATIONS] for a in valid]) + e.gamma0
    omegas = np.array([[a[s].omega_observed for s in PREPARATIONS] for a in valid])
    preparations = {
        spin: PreparationStats(
            gamma_mean=float(gammas[:, k].mean()),
            gamma_std=_spread(gammas[:, k]),
            omega_mean=float(omegas[:, k].mean()),
            omega_std=_spread(omegas[:, k]),
        )
        for k, spin in enumerate(PREPARATIONS)
    }
    pooled_gamma = gammas.mean(axis=1)
    shifts = omegas.mean(axis=1) - omega_g
    gamma_mean = float(pooled_gamma.mean())
    return SweepRow(
        omega_g=omega_g,
        gamma_mean=gamma_mean,
        gamma_std=_spread(pooled_gamma),
        shift_mean=float(shifts.mean()),
        shift_std=_spread(shifts),
        photons_scattered=e.gamma_rad / gamma_mean if gamma_mean > 0.0 else math.inf,
        preparations=preparations,
        n_valid=len(valid),
        n_realizations=len(cells),
        errors=errors,
    )


def reproduce_fig2(
    e: EnsembleSpec,
    omega_g_grid: Sequence[float] | FloatArray,
    *,
    mapper: Mapper = map,
) -> SweepResult:
    """Ensemble-averaged decoherence rate and frequency shift against omega_g.

    Reported rates include the offset ``gamma0``; every (omega_g,
    realization) cell is analyzed for spins prepared along x and z.
    """
    grid = np.sort(np.asarray(omega_g_grid, dtype=np.float64))
    limit = MAX_FIG2_OMEGA_G * e.gamma_rad
    if grid.ndim != 1 or grid.size == 0 or grid[0] <= 0.0 or grid[-1] > limit * (1 + 1e-12):
        raise InvalidModelError(
            translation_key="invalid_grid",
            translation_placeholders={"reason": f"omega_g must lie in (0, {limit:g}]"},
        )

    tasks = [(e, float(w), k) for w in grid for k in range(e.n_realizations)]
    _LOGGER.debug("Analyzing %d ensemble cells", len(tasks))
    cells = list(mapper(_fig2_cell, tasks))
    rows = tuple(
        _sweep_row(e, float(w), cells[i * e.n_realizations : (i + 1) * e.n_realizations])
        for i, w in enumerate(grid)
    )
    return SweepResult(
        rows=rows,
        gamma_rad=e.gamma_rad,
        gamma0=e.gamma0,
        gamma_dark=e.gamma_dark * e.gamma_rad,
        occupation=str(e.occupation),
    )


def anisotropy_scenario(
    omega_g: float, delta_z: float, rates: tuple[float, float]
) -> AnisotropyRates:
    """Decay of x- and z-prepared spins when the excited state only adds a z field."""
    rate_ba, rate_ab = rates
    ground = PrecessionVector(0.0, 0.0, omega_g)
    spec = FluctuatorSpec.two_state(
        rate_ba, rate_ab, ground, ground + PrecessionVector(0.0, 0.0, delta_z)
    )
    return AnisotropyRates(
        gamma_x=_analyze(spec, "+x", Occupation.STATIONARY).gamma_decay,
        gamma_z=_analyze(spec, "+z", Occupation.STATIONARY).gamma_decay,
    )


def perpendicular_spin(omega: PrecessionVector) -> str | FloatArray:
    """Unit spin direction orthogonal to a precession vector."""
    axis = omega.as_array()
    if omega.norm == 0.0:
        return "+x"
    axis = axis / omega.norm
    spin = np.cross(axis, np.eye(3)[int(np.argmin(np.abs(axis)))])
    return spin / np.linalg.norm(spin)


def sweet_spot(
    spec: FluctuatorSpec, excited_states: Sequence[int] | None = None
) -> SweetSpotResult:
    """Uniform field added to the excited class that best matches the ground class.

    The shift is the least-squares choice, the difference of the class means;
    it is exact when each class holds identical vectors.
    """
    excited = tuple(range(1, spec.n_states)) if excited_states is None else tuple(excited_states)
    for index in excited:
        if not 0 <= index < spec.n_states:
            raise InvalidStateError(
                translation_key="invalid_state_index",
                translation_placeholders={"index": index, "last": spec.n_states - 1},
            )
    ground = tuple(i for i in range(spec.n_states) if i not in excited)
    if not excited or not ground:
        raise InvalidStateError(
            translation_key="invalid_state_index",
            translation_placeholders={"index": list(excited), "last": spec.n_states - 1},
        )

    table = spec.omega_array()
    shift = table[list(ground)].mean(axis=0) - table[list(excited)].mean(axis=0)
    compensated = table.copy()
    compensated[list(excited)] += shift
    compensated_spec = FluctuatorSpec(spec.rates, tuple(compensated), spec.labels)

    scale = max(1.0, float(np.max(np.linalg.norm(table, axis=1))))
    compensable = bool(np.all(np.abs(compensated - compensated[0]) <= SPECTRAL_TOLERANCE * scale))
    if not compensable:
        _LOGGER.warning(
            "No single field equalizes all %d precession vectors; using least-squares shift",
            spec.n_states,
        )

    spin = perpendicular_spin(spec.omegas[ground[0]])
    return SweetSpotResult(
        compensation=PrecessionVector.from_array(shift),
        residual_gamma=_analyze(compensated_spec, spin, Occupation.STATIONARY).gamma_decay,
        uncompensated_gamma=_analyze(spec, spin, Occupation.STATIONARY).gamma_decay,
        compensable=compensable,
        compensated_spec=compensated_spec,
        excited_states=excited,
    )
