"""Configuration loading and validation for the fluxspin commands."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import voluptuous as vol
import yaml

from .const import (
    COMMAND_CROSSOVER,
    COMMAND_FIG2,
    COMMAND_MC_VALIDATE,
    COMMAND_SIMULATE,
    COMMAND_SWEETSPOT,
    CONF_DIRECTION,
    CONF_DIRECTORY,
    CONF_ENSEMBLE,
    CONF_EXCITATION_RATE,
    CONF_EXCITED_STATES,
    CONF_FORMATS,
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
    CONF_OUTPUT,
    CONF_PLOT,
    CONF_POINTS,
    CONF_PROBABILITIES,
    CONF_RATE_AB,
    CONF_RATE_BA,
    CONF_RATES,
    CONF_RESAMPLE,
    CONF_SCHEMA_VERSION,
    CONF_SEED,
    CONF_SIGMA_OMEGA_RATIO,
    CONF_SPACING,
    CONF_SPIN,
    CONF_START,
    CONF_STOP,
    CONF_TEMPLATE,
    CONF_WORKERS,
    CONFIG_SCHEMA_VERSION,
    DEFAULT_CROSSOVER_GRID_POINTS,
    DEFAULT_CROSSOVER_GRID_START,
    DEFAULT_CROSSOVER_GRID_STOP,
    DEFAULT_FIG2_GRID_POINTS,
    DEFAULT_FIG2_GRID_START,
    DEFAULT_FIG2_GRID_STOP,
    DEFAULT_GAMMA0_OFFSET,
    DEFAULT_GAMMA_DARK,
    DEFAULT_GAMMA_RAD,
    DEFAULT_GRID_POINTS,
    DEFAULT_MC_GRID_POINTS,
    DEFAULT_N_REALIZATIONS,
    DEFAULT_N_STATES,
    DEFAULT_N_TRAJECTORIES,
    DEFAULT_OUTPUT_DIRECTORY,
    DEFAULT_SIGMA_OMEGA_RATIO,
    FORMAT_CSV,
    FORMAT_JSON,
    MAX_FIG2_OMEGA_G,
    MAX_GRID_POINTS,
    MAX_N_REALIZATIONS,
    MAX_N_STATES,
    MAX_N_TRAJECTORIES,
    MAX_WORKERS,
    MIN_GRID_POINTS,
    MIN_N_REALIZATIONS,
    MIN_N_STATES,
    MIN_N_TRAJECTORIES,
    MIN_WORKERS,
    OUTPUT_FORMATS,
)
from .coordinator import default_workers
from .exceptions import ConfigError
from .propagator import Occupation

_LOGGER = logging.getLogger(__name__)

SPACING_LOG = "log"
SPACING_LINEAR = "linear"
SPIN_AXES = ["+x", "-x", "+y", "-y", "+z", "-z", "x", "y", "z"]


def _finite(value: Any) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise vol.Invalid(f"expected a finite number, got {value!r}")
    return number


FINITE = vol.All(vol.Coerce(float), _finite)
NON_NEGATIVE = vol.All(FINITE, vol.Range(min=0.0))
POSITIVE = vol.All(FINITE, vol.Range(min=0.0, min_included=False))
VECTOR = vol.All([FINITE], vol.Length(min=3, max=3))
SPIN = vol.Any(vol.In(SPIN_AXES), VECTOR)
GRID_POINTS = vol.All(vol.Coerce(int), vol.Range(min=MIN_GRID_POINTS, max=MAX_GRID_POINTS))

OUTPUT_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_DIRECTORY, default=DEFAULT_OUTPUT_DIRECTORY): str,
        vol.Optional(CONF_FORMATS, default=list(OUTPUT_FORMATS)): vol.All(
            [vol.In(OUTPUT_FORMATS)], vol.Length(min=1)
        ),
        vol.Optional(CONF_PLOT, default=False): bool,
    }
)

MODEL_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_RATES): vol.All([[NON_NEGATIVE]], vol.Length(min=1)),
        vol.Required(CONF_OMEGAS): vol.All([VECTOR], vol.Length(min=1)),
        vol.Optional(CONF_LABELS): [str],
    }
)

OCCUPATION_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_MODE, default=Occupation.GROUND_ONLY.value): vol.In(
            [mode.value for mode in Occupation]
        ),
        vol.Optional(CONF_PROBABILITIES): [NON_NEGATIVE],
    }
)


def _time_grid_schema(points: int) -> vol.Schema:
    return vol.Schema(
        {
            vol.Optional(CONF_START, default=0.0): NON_NEGATIVE,
            vol.Optional(CONF_STOP): NON_NEGATIVE,
            vol.Optional(CONF_POINTS, default=points): GRID_POINTS,
        }
    )


def _scan_grid_schema(start: float, stop: float, points: int) -> vol.Schema:
    return vol.Schema(
        {
            vol.Optional(CONF_START, default=start): NON_NEGATIVE,
            vol.Optional(CONF_STOP, default=stop): POSITIVE,
            vol.Optional(CONF_POINTS, default=points): GRID_POINTS,
            vol.Optional(CONF_SPACING, default=SPACING_LOG): vol.In([SPACING_LOG, SPACING_LINEAR]),
        }
    )


TEMPLATE_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_RATE_BA, default=0.5): POSITIVE,
        vol.Optional(CONF_RATE_AB, default=0.5): POSITIVE,
        vol.Optional(CONF_MEAN_OMEGA, default=[0.0, 0.0, 0.0]): VECTOR,
        vol.Optional(CONF_DIRECTION, default=[0.0, 0.0, 1.0]): VECTOR,
        vol.Optional(CONF_SPIN, default="+x"): SPIN,
    }
)

ENSEMBLE_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_N_STATES, default=DEFAULT_N_STATES): vol.All(
            vol.Coerce(int), vol.Range(min=MIN_N_STATES, max=MAX_N_STATES)
        ),
        vol.Optional(CONF_SIGMA_OMEGA_RATIO, default=DEFAULT_SIGMA_OMEGA_RATIO): NON_NEGATIVE,
        vol.Optional(CONF_GAMMA_RAD, default=DEFAULT_GAMMA_RAD): POSITIVE,
        vol.Optional(CONF_EXCITATION_RATE): POSITIVE,
        vol.Optional(CONF_N_REALIZATIONS, default=DEFAULT_N_REALIZATIONS): vol.All(
            vol.Coerce(int), vol.Range(min=MIN_N_REALIZATIONS, max=MAX_N_REALIZATIONS)
        ),
        vol.Optional(CONF_OCCUPATION, default=Occupation.GROUND_ONLY.value): vol.In(
            [Occupation.GROUND_ONLY.value, Occupation.STATIONARY.value]
        ),
        vol.Optional(CONF_GAMMA0_OFFSET, default=DEFAULT_GAMMA0_OFFSET): NON_NEGATIVE,
        vol.Optional(CONF_GAMMA_DARK, default=DEFAULT_GAMMA_DARK): NON_NEGATIVE,
        vol.Optional(CONF_RESAMPLE, default=False): bool,
    }
)

COMMON_SCHEMA: dict[vol.Marker, Any] = {
    vol.Required(CONF_SCHEMA_VERSION): vol.All(vol.Coerce(int), vol.Equal(CONFIG_SCHEMA_VERSION)),
    vol.Optional(CONF_SEED): vol.All(vol.Coerce(int), vol.Range(min=0)),
    vol.Optional(CONF_WORKERS): vol.All(vol.Coerce(int), vol.Range(min=MIN_WORKERS, max=MAX_WORKERS)),
    vol.Optional(CONF_OUTPUT, default=dict): OUTPUT_SCHEMA,
}

COMMAND_SCHEMAS: dict[str, vol.Schema] = {
    COMMAND_SIMULATE: vol.Schema(
        {
            **COMMON_SCHEMA,
            vol.Required(CONF_MODEL): MODEL_SCHEMA,
            vol.Optional(CONF_SPIN, default="+x"): SPIN,
            vol.Optional(CONF_OCCUPATION, default=dict): OCCUPATION_SCHEMA,
            vol.Optional(CONF_GRID, default=dict): _time_grid_schema(DEFAULT_GRID_POINTS),
        }
    ),
    COMMAND_CROSSOVER: vol.Schema(
        {
            **COMMON_SCHEMA,
            vol.Optional(CONF_TEMPLATE, default=dict): TEMPLATE_SCHEMA,
            vol.Optional(CONF_GRID, default=dict): _scan_grid_schema(
                DEFAULT_CROSSOVER_GRID_START,
                DEFAULT_CROSSOVER_GRID_STOP,
                DEFAULT_CROSSOVER_GRID_POINTS,
            ),
        }
    ),
    COMMAND_FIG2: vol.Schema(
        {
            **COMMON_SCHEMA,
            vol.Optional(CONF_ENSEMBLE, default=dict): ENSEMBLE_SCHEMA,
            vol.Optional(CONF_GRID, default=dict): vol.All(
                _scan_grid_schema(
                    DEFAULT_FIG2_GRID_START, DEFAULT_FIG2_GRID_STOP, DEFAULT_FIG2_GRID_POINTS
                ),
                vol.Schema(
                    {
                        vol.Required(CONF_START): vol.Range(min=0.0, min_included=False),
                        vol.Required(CONF_STOP): vol.Range(max=MAX_FIG2_OMEGA_G),
                    },
                    extra=vol.ALLOW_EXTRA,
                ),
            ),
        }
    ),
    COMMAND_MC_VALIDATE: vol.Schema(
        {
            **COMMON_SCHEMA,
            vol.Required(CONF_MODEL): MODEL_SCHEMA,
            vol.Optional(CONF_SPIN, default="+x"): SPIN,
            vol.Optional(CONF_OCCUPATION, default=dict): OCCUPATION_SCHEMA,
            vol.Optional(CONF_GRID, default=dict): _time_grid_schema(DEFAULT_MC_GRID_POINTS),
            vol.Optional(CONF_N_TRAJECTORIES, default=DEFAULT_N_TRAJECTORIES): vol.All(
                vol.Coerce(int), vol.Range(min=MIN_N_TRAJECTORIES, max=MAX_N_TRAJECTORIES)
            ),
        }
    ),
    COMMAND_SWEETSPOT: vol.Schema(
        {
            **COMMON_SCHEMA,
            vol.Required(CONF_MODEL): MODEL_SCHEMA,
            vol.Optional(CONF_EXCITED_STATES): vol.All(
                [vol.All(vol.Coerce(int), vol.Range(min=0))], vol.Length(min=1)
            ),
        }
    ),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one command run."""

    command: str
    seed: int
    workers: int
    directory: Path
    formats: tuple[str, ...]
    plot: bool
    parameters: dict[str, Any] = field(default_factory=dict)

    @property
    def write_csv(self) -> bool:
        """Return True when the table is requested."""
        return FORMAT_CSV in self.formats

    @property
    def write_json(self) -> bool:
        """Return True when the envelope is requested."""
        return FORMAT_JSON in self.formats

    def as_dict(self) -> dict[str, Any]:
        """Configuration echo that replays this run."""
        return {
            CONF_SCHEMA_VERSION: CONFIG_SCHEMA_VERSION,
            CONF_SEED: self.seed,
            CONF_WORKERS: self.workers,
            CONF_OUTPUT: {
                CONF_DIRECTORY: str(self.directory),
                CONF_FORMATS: list(self.formats),
                CONF_PLOT: self.plot,
            },
            **self.parameters,
        }


def read_config_file(path: Path) -> dict[str, Any]:
    """Read a YAML config or a result envelope (its ``config`` section)."""
    try:
        text = path.read_text(encoding="utf-8")
        # YAML 1.1 reads exponent floats such as 1e-05 as strings
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (OSError, ValueError, yaml.YAMLError) as err:
        raise ConfigError(
            translation_key="config_unreadable",
            translation_placeholders={"path": path, "error": err},
        ) from err
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(
            translation_placeholders={"path": "<root>", "error": "expected a mapping"}
        )
    if "payload" in data and isinstance(data.get("config"), dict):
        _LOGGER.debug("Replaying configuration echoed in %s", path)
        return dict(data["config"])
    return data


def validate_config(
    command: str, data: dict[str, Any], overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Merge overrides, validate against the command schema and resolve defaults."""
    raw = dict(data)
    output = dict(raw.get(CONF_OUTPUT) or {})
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in (CONF_DIRECTORY, CONF_PLOT):
            output[key] = value
        else:
            raw[key] = value
    if output:
        raw[CONF_OUTPUT] = output

    try:
        validated = COMMAND_SCHEMAS[command](raw)
    except vol.MultipleInvalid as err:
        if CONF_SCHEMA_VERSION in raw and any(
            e.path == [CONF_SCHEMA_VERSION] for e in err.errors
        ):
            raise ConfigError(
                translation_key="config_version",
                translation_placeholders={
                    "version": raw[CONF_SCHEMA_VERSION],
                    "expected": CONFIG_SCHEMA_VERSION,
                },
            ) from err
        error = err.errors[0]
        raise ConfigError(
            translation_placeholders={
                "path": ".".join(str(part) for part in error.path) or "<root>",
                "error": error.error_message,
            }
        ) from err

    seed = validated.pop(CONF_SEED, None)
    if seed is None:
        seed = int(np.random.SeedSequence().entropy) % 2**63
        _LOGGER.info("No seed configured, using %d", seed)
    workers = validated.pop(CONF_WORKERS, None) or default_workers()
    output = validated.pop(CONF_OUTPUT)
    validated.pop(CONF_SCHEMA_VERSION)
    return RunConfig(
        command=command,
        seed=seed,
        workers=workers,
        directory=Path(output[CONF_DIRECTORY]),
        formats=tuple(output[CONF_FORMATS]),
        plot=output[CONF_PLOT],
        parameters=validated,
    )


def load_run_config(
    command: str, path: Path, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Read and validate the configuration file of a command."""
    return validate_config(command, read_config_file(path), overrides)
