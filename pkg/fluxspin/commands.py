"""Command implementations: build models from config, run them, shape the output."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .analysis import CrossoverTemplate, crossover_scan, extract_spectral, fit_time_domain
from .config import SPACING_LOG, RunConfig
from .const import (
    COMMAND_CROSSOVER,
    COMMAND_FIG2,
    COMMAND_MC_VALIDATE,
    COMMAND_SIMULATE,
    COMMAND_SWEETSPOT,
    CONF_DIRECTION,
    CONF_ENSEMBLE,
    CONF_EXCITATION_RATE,
    CONF_EXCITED_STATES,
    CONF_GAMMA0_OFFSET,
    CONF_GAMMA_DARK,
    CONF_GAMMA_RAD,
    CONF_GRID,
    CONF_LABELS,
    CONF_MEAN_OMEGA,
    CONF_MODE,
    CONF_MODEL,
    CONF_N_REALIZATIONS,
    CONF_N_STATES,
    CONF_N_TRAJECTORIES,
    CONF_OCCUPATION,
    CONF_OMEGAS,
    CONF_POINTS,
    CONF_PROBABILITIES,
    CONF_RATE_AB,
    CONF_RATE_BA,
    CONF_RATES,
    CONF_RESAMPLE,
    CONF_SIGMA_OMEGA_RATIO,
    CONF_SPACING,
    CONF_SPIN,
    CONF_START,
    CONF_STOP,
    CONF_TEMPLATE,
    DEFAULT_MC_SWITCHING_TIMES,
    MC_AGREEMENT_SIGMAS,
)
from .coordinator import SweepCoordinator
from .data import SimulationSample, StateCompensation, ValidationSample
from .exceptions import FluxspinError, InvalidModelError, InvalidTimeGridError, load_strings
from .experiments import EnsembleSpec, perpendicular_spin, reproduce_fig2, sweet_spot
from .fluctuator import FluctuatorSpec, average_precession, exit_rates
from .plots import (
    plot_bloch_series,
    plot_compensation,
    plot_crossover,
    plot_sweep,
    plot_validation,
)
from .propagator import (
    Occupation,
    build_generator,
    default_time_grid,
    initial_joint_state,
    populations,
    propagate,
    reduce,
    reduced_bloch_series,
)
from .quantum import BlochVector, FloatArray, PrecessionVector, bloch_from_density
from .sampler import ensemble_average
from .tables import (
    COMPENSATION_COLUMNS,
    VALIDATION_COLUMNS,
    ColumnDescription,
    crossover_columns,
    simulation_columns,
    sweep_columns,
)

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class CommandResult:
    """Everything a command hands back for persistence."""

    payload: Any
    columns: Sequence[ColumnDescription]
    rows: Sequence[Any]
    plot_fn: Callable[[Path], None] | None = None
    errors: list[str] = field(default_factory=list)


@dataclass(frozen=True, kw_only=True)
class CommandDescription:
    """Describes one CLI command."""

    key: str
    run_fn: Callable[[RunConfig, SweepCoordinator], CommandResult]

    @property
    def description(self) -> str:
        """Help text from strings.json."""
        text: str = load_strings()["commands"][self.key]["description"]
        return text


def spec_from_config(model: dict[str, Any]) -> FluctuatorSpec:
    """Build a fluctuator from the ``model`` section."""
    return FluctuatorSpec(
        np.asarray(model[CONF_RATES], dtype=np.float64),
        tuple(PrecessionVector.from_array(w) for w in model[CONF_OMEGAS]),
        model.get(CONF_LABELS),
    )


def spin_from_config(value: str | list[float]) -> BlochVector:
    """Resolve an axis name or a vector into a pure spin state."""
    return BlochVector.along(value)


def time_grid_from_config(spec: FluctuatorSpec, grid: dict[str, Any], **kwargs: Any) -> FloatArray:
    """Explicit time grid, or the default decay-analysis grid when no stop is given."""
    points = grid[CONF_POINTS]
    start = grid[CONF_START]
    stop = grid.get(CONF_STOP)
    if stop is None:
        stop = float(default_time_grid(spec, 2, **kwargs)[-1])
    if stop < start or (points > 1 and stop == start):
        raise InvalidTimeGridError(
            translation_placeholders={"reason": f"stop {stop} must exceed start {start}"}
        )
    return np.linspace(start, stop, points)


def scan_grid_from_config(grid: dict[str, Any], unit: float) -> FloatArray:
    """Scan abscissa in physical units; the config gives it in units of ``unit``."""
    start, stop, points = grid[CONF_START], grid[CONF_STOP], grid[CONF_POINTS]
    if grid[CONF_SPACING] == SPACING_LOG:
        if not 0.0 < start < stop or points < 2:
            raise InvalidModelError(
                translation_key="invalid_grid",
                translation_placeholders={"reason": "log spacing needs 0 < start < stop"},
            )
        return unit * np.geomspace(start, stop, points)
    if stop <= start and points > 1:
        raise InvalidModelError(
            translation_key="invalid_grid",
            translation_placeholders={"reason": f"stop {stop} must exceed start {start}"},
        )
    return unit * np.linspace(start, stop, points)


def _occupation(section: dict[str, Any]) -> tuple[Occupation, list[float] | None]:
    return Occupation(section[CONF_MODE]), section.get(CONF_PROBABILITIES)


def run_simulate(config: RunConfig, coordinator: SweepCoordinator) -> CommandResult:
    """Propagate the joint master equation and tabulate the reduced spin."""
    params = config.parameters
    spec = spec_from_config(params[CONF_MODEL])
    occupation, probabilities = _occupation(params[CONF_OCCUPATION])
    grid = time_grid_from_config(spec, params[CONF_GRID])
    generator = build_generator(spec)
    s0 = initial_joint_state(spec, spin_from_config(params[CONF_SPIN]), occupation, probabilities)

    samples = []
    for state in propagate(generator, s0, grid):
        bloch = bloch_from_density(reduce(state))
        samples.append(
            SimulationSample(
                t_us=state.time,
                bloch=(bloch.sx, bloch.sy, bloch.sz),
                populations=tuple(float(p) for p in populations(state)),
            )
        )

    errors: list[str] = []
    analysis = None
    try:
        analysis = extract_spectral(generator, s0)
    except FluxspinError as err:
        _LOGGER.warning("Spectral analysis unavailable: %s", err.message)
        errors.append(err.translation_key)
    coordinator.record([True])

    return CommandResult(
        payload={"model": spec, "analysis": analysis},
        columns=simulation_columns(spec.n_states),
        rows=samples,
        plot_fn=lambda path: plot_bloch_series(
            path, samples, "reduced Bloch vector", _switching_time(spec)
        ),
        errors=errors,
    )


def run_crossover(config: RunConfig, coordinator: SweepCoordinator) -> CommandResult:
    """Decay rate against differential precession frequency."""
    section = config.parameters[CONF_TEMPLATE]
    template = CrossoverTemplate(
        rate_ba=section[CONF_RATE_BA],
        rate_ab=section[CONF_RATE_AB],
        mean_omega=PrecessionVector.from_array(section[CONF_MEAN_OMEGA]),
        direction=tuple(section[CONF_DIRECTION]),
        spin=section[CONF_SPIN] if isinstance(section[CONF_SPIN], str) else tuple(section[CONF_SPIN]),
    )
    grid = scan_grid_from_config(config.parameters[CONF_GRID], template.rate_scale)
    curve = crossover_scan(template, grid, mapper=coordinator.map)
    coordinator.record(point.valid for point in curve.points)
    return CommandResult(
        payload=curve,
        columns=crossover_columns(curve.rate_scale),
        rows=curve.points,
        plot_fn=lambda path: plot_crossover(path, curve),
        errors=[p.error for p in curve.points if p.error is not None],
    )


def ensemble_from_config(section: dict[str, Any], seed: int) -> EnsembleSpec:
    """Build the random excited-state ensemble from the ``ensemble`` section."""
    return EnsembleSpec(
        n_states=section[CONF_N_STATES],
        sigma_omega_ratio=section[CONF_SIGMA_OMEGA_RATIO],
        gamma_rad=section[CONF_GAMMA_RAD],
        excitation_rate=section.get(CONF_EXCITATION_RATE),
        n_realizations=section[CONF_N_REALIZATIONS],
        seed=seed,
        occupation=Occupation(section[CONF_OCCUPATION]),
        gamma0_offset=section[CONF_GAMMA0_OFFSET],
        gamma_dark=section[CONF_GAMMA_DARK],
        resample_per_omega=section[CONF_RESAMPLE],
    )


def run_fig2(config: RunConfig, coordinator: SweepCoordinator) -> CommandResult:
    """Ensemble sweep of decay rate and frequency shift."""
    ensemble = ensemble_from_config(config.parameters[CONF_ENSEMBLE], config.seed)
    grid = scan_grid_from_config(config.parameters[CONF_GRID], ensemble.gamma_rad)
    result = reproduce_fig2(ensemble, grid, mapper=coordinator.map)
    for row in result.rows:
        coordinator.record([True] * row.n_valid + [False] * (row.n_realizations - row.n_valid))
    return CommandResult(
        payload=result,
        columns=sweep_columns(result.gamma_rad),
        rows=result.rows,
        plot_fn=lambda path: plot_sweep(path, result),
        errors=[error for row in result.rows for error in row.errors],
    )


def _quantization_axis(spec: FluctuatorSpec) -> FloatArray:
    if spec.n_states == 1:
        return spec.omegas[0].as_array()
    try:
        return average_precession(spec).as_array()
    except FluxspinError:
        return np.zeros(3)


def _switching_time(spec: FluctuatorSpec) -> float | None:
    """Dwell time of the fastest-switching state, None without switching."""
    fastest = float(np.max(exit_rates(spec)))
    return 1.0 / fastest if fastest > 0.0 else None


def run_mc_validate(config: RunConfig, coordinator: SweepCoordinator) -> CommandResult:
    """Monte Carlo ensemble against the exact master-equation solution."""
    params = config.parameters
    spec = spec_from_config(params[CONF_MODEL])
    spin = spin_from_config(params[CONF_SPIN])
    occupation, probabilities = _occupation(params[CONF_OCCUPATION])
    grid = time_grid_from_config(
        spec, params[CONF_GRID], switching_times=DEFAULT_MC_SWITCHING_TIMES
    )

    exact = reduced_bloch_series(
        build_generator(spec), initial_joint_state(spec, spin, occupation, probabilities), grid
    )
    ensemble = ensemble_average(
        spec,
        spin,
        occupation,
        params[CONF_N_TRAJECTORIES],
        grid,
        config.seed,
        probabilities=probabilities,
        mapper=coordinator.map,
    )
    samples = [
        ValidationSample(
            t_us=float(t),
            exact=(float(e[0]), float(e[1]), float(e[2])),
            sampled=(float(m[0]), float(m[1]), float(m[2])),
            stderr=(float(s[0]), float(s[1]), float(s[2])),
        )
        for t, e, m, s in zip(grid, exact, ensemble.mean, ensemble.stderr, strict=True)
    ]
    max_deviation = max(max(sample.deviation) for sample in samples)
    passed = max_deviation <= MC_AGREEMENT_SIGMAS
    if not passed:
        _LOGGER.warning(
            "Monte Carlo deviates by %.2f standard errors (limit %g)",
            max_deviation,
            MC_AGREEMENT_SIGMAS,
        )
    coordinator.record([passed])

    axis = _quantization_axis(spec)
    fits: dict[str, Any] = {}
    errors: list[str] = []
    for name, series in (("master_equation", exact), ("monte_carlo", ensemble.mean)):
        try:
            fits[name] = fit_time_domain(grid, series, axis)
        except FluxspinError as err:
            _LOGGER.warning("Time-domain fit of %s failed: %s", name, err.message)
            fits[name] = {"error": err.translation_key}
            errors.append(err.translation_key)

    return CommandResult(
        payload={
            "passed": passed,
            "max_deviation": max_deviation,
            "threshold": MC_AGREEMENT_SIGMAS,
            "fits": fits,
            "ensemble": ensemble,
        },
        columns=VALIDATION_COLUMNS,
        rows=samples,
        plot_fn=lambda path: plot_validation(path, samples, _switching_time(spec)),
        errors=errors,
    )


def run_sweetspot(config: RunConfig, coordinator: SweepCoordinator) -> CommandResult:
    """Compensating field and decay before and after applying it."""
    spec = spec_from_config(config.parameters[CONF_MODEL])
    result = sweet_spot(spec, config.parameters.get(CONF_EXCITED_STATES))
    after = result.compensated_spec.omega_array()
    rows = [
        StateCompensation(
            label=label,
            excited=index in result.excited_states,
            before=(w.x, w.y, w.z),
            after=(float(after[index, 0]), float(after[index, 1]), float(after[index, 2])),
        )
        for index, (label, w) in enumerate(zip(spec.state_labels, spec.omegas, strict=True))
    ]
    coordinator.record([True])

    def plot(path: Path) -> None:
        ground = next(i for i in range(spec.n_states) if i not in result.excited_states)
        spin = BlochVector.along(perpendicular_spin(spec.omegas[ground]))
        times = default_time_grid(spec)
        series = {
            name: reduced_bloch_series(
                build_generator(model),
                initial_joint_state(model, spin, Occupation.STATIONARY),
                times,
            )
            for name, model in (
                ("uncompensated", spec),
                ("compensated", result.compensated_spec),
            )
        }
        plot_compensation(path, times, series, _switching_time(spec))

    return CommandResult(
        payload=result,
        columns=COMPENSATION_COLUMNS,
        rows=rows,
        plot_fn=plot,
    )


COMMAND_DESCRIPTIONS: tuple[CommandDescription, ...] = (
    CommandDescription(key=COMMAND_SIMULATE, run_fn=run_simulate),
    CommandDescription(key=COMMAND_CROSSOVER, run_fn=run_crossover),
    CommandDescription(key=COMMAND_FIG2, run_fn=run_fig2),
    CommandDescription(key=COMMAND_MC_VALIDATE, run_fn=run_mc_validate),
    CommandDescription(key=COMMAND_SWEETSPOT, run_fn=run_sweetspot),
)
