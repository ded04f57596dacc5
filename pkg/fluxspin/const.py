"""Constants for the fluxspin simulator."""

from __future__ import annotations

from typing import Final

# Package
DOMAIN: Final = "fluxspin"
VERSION: Final = "1.0.0"

# Schema versions
CONFIG_SCHEMA_VERSION: Final = 1
ENVELOPE_SCHEMA_VERSION: Final = 1

# NV ensemble defaults (rates in 1/us, frequencies in rad/us)
DEFAULT_GAMMA_RAD: Final = 86.0
DEFAULT_N_STATES: Final = 3
DEFAULT_SIGMA_OMEGA_RATIO: Final = 2.5
DEFAULT_N_REALIZATIONS: Final = 50
DEFAULT_GAMMA0_OFFSET: Final = 3.4e-3
DEFAULT_GAMMA_DARK: Final = 3e-4

# Ensemble sweep default grid, in units of gamma
DEFAULT_FIG2_GRID_START: Final = 0.005
DEFAULT_FIG2_GRID_STOP: Final = 0.22
DEFAULT_FIG2_GRID_POINTS: Final = 20
MAX_FIG2_OMEGA_G: Final = 0.25

# Crossover default grid, in units of the total switching rate
DEFAULT_CROSSOVER_GRID_START: Final = 0.01
DEFAULT_CROSSOVER_GRID_STOP: Final = 100.0
DEFAULT_CROSSOVER_GRID_POINTS: Final = 60

# Default time grid
DEFAULT_GRID_POINTS: Final = 2000
DEFAULT_GRID_DECAY_TIMES: Final = 10.0
DEFAULT_GRID_SWITCHING_TIMES: Final = 500.0
DEFAULT_MC_GRID_POINTS: Final = 200
DEFAULT_MC_SWITCHING_TIMES: Final = 50.0

# Numerical tolerances
HERMITICITY_TOLERANCE: Final = 1e-9
TRACE_TOLERANCE: Final = 1e-9
ROUND_TRIP_TOLERANCE: Final = 1e-12
PROBABILITY_TOLERANCE: Final = 1e-12
CONDITION_LIMIT: Final = 1e8
CHECKPOINT_TOLERANCE: Final = 1e-7
SPECTRAL_TOLERANCE: Final = 1e-9
AMPLITUDE_FLOOR: Final = 1e-9
POOR_FIT_THRESHOLD: Final = 0.05
MIN_FIT_SAMPLES: Final = 50
MIN_FIT_PERIODS: Final = 2.0
MIN_FIT_DECAY_TIMES: Final = 3.0
MC_AGREEMENT_SIGMAS: Final = 4.0
VALID_POINT_FRACTION: Final = 0.95

# Exit codes
EXIT_OK: Final = 0
EXIT_CONFIG_ERROR: Final = 2
EXIT_PARTIAL_FAILURE: Final = 3
EXIT_NUMERICAL_DEGENERACY: Final = 4

# Configuration keys
CONF_SCHEMA_VERSION: Final = "schema_version"
CONF_SEED: Final = "seed"
CONF_WORKERS: Final = "workers"
CONF_OUTPUT: Final = "output"
CONF_DIRECTORY: Final = "directory"
CONF_FORMATS: Final = "formats"
CONF_PLOT: Final = "plot"
CONF_MODEL: Final = "model"
CONF_RATES: Final = "rates"
CONF_OMEGAS: Final = "omegas"
CONF_LABELS: Final = "labels"
CONF_SPIN: Final = "spin"
CONF_OCCUPATION: Final = "occupation"
CONF_MODE: Final = "mode"
CONF_PROBABILITIES: Final = "probabilities"
CONF_GRID: Final = "grid"
CONF_START: Final = "start"
CONF_STOP: Final = "stop"
CONF_POINTS: Final = "points"
CONF_SPACING: Final = "spacing"
CONF_TEMPLATE: Final = "template"
CONF_RATE_BA: Final = "rate_ba"
CONF_RATE_AB: Final = "rate_ab"
CONF_MEAN_OMEGA: Final = "mean_omega"
CONF_DIRECTION: Final = "direction"
CONF_ENSEMBLE: Final = "ensemble"
CONF_N_STATES: Final = "n_states"
CONF_SIGMA_OMEGA_RATIO: Final = "sigma_omega_ratio"
CONF_GAMMA_RAD: Final = "gamma_rad"
CONF_EXCITATION_RATE: Final = "excitation_rate"
CONF_N_REALIZATIONS: Final = "n_realizations"
CONF_GAMMA0_OFFSET: Final = "gamma0_offset"
CONF_GAMMA_DARK: Final = "gamma_dark"
CONF_RESAMPLE: Final = "resample_per_omega"
CONF_N_TRAJECTORIES: Final = "n_trajectories"
CONF_EXCITED_STATES: Final = "excited_states"

# Option ranges
MIN_WORKERS: Final = 1
MAX_WORKERS: Final = 256
MIN_GRID_POINTS: Final = 1
MAX_GRID_POINTS: Final = 100_000
MIN_N_STATES: Final = 2
MAX_N_STATES: Final = 64
MIN_N_REALIZATIONS: Final = 1
MAX_N_REALIZATIONS: Final = 100_000
MIN_N_TRAJECTORIES: Final = 2
MAX_N_TRAJECTORIES: Final = 10_000_000
DEFAULT_N_TRAJECTORIES: Final = 20_000

# Output formats
FORMAT_CSV: Final = "csv"
FORMAT_JSON: Final = "json"
OUTPUT_FORMATS: Final = [FORMAT_CSV, FORMAT_JSON]
DEFAULT_OUTPUT_DIRECTORY: Final = "fluxspin-out"

# Commands
COMMAND_SIMULATE: Final = "simulate"
COMMAND_CROSSOVER: Final = "crossover"
COMMAND_FIG2: Final = "fig2"
COMMAND_MC_VALIDATE: Final = "mc-validate"
COMMAND_SWEETSPOT: Final = "sweetspot"

COMMANDS: Final = [
    COMMAND_SIMULATE,
    COMMAND_CROSSOVER,
    COMMAND_FIG2,
    COMMAND_MC_VALIDATE,
    COMMAND_SWEETSPOT,
]
