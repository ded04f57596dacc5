"""Column descriptions and CSV writing for the command tables."""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .data import SweepRow

_LOGGER = logging.getLogger(__name__)

AXES = ("sx", "sy", "sz")


@dataclass(frozen=True, kw_only=True)
class ColumnDescription:
    """Describes one CSV column."""

    key: str
    value_fn: Callable[[Any], Any]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value).lower()
    return str(value)


def write_csv(path: Path, columns: Sequence[ColumnDescription], rows: Iterable[Any]) -> None:
    """Write a single-header, LF-terminated, locale-independent CSV file."""
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(column.key for column in columns)
        count = 0
        for row in rows:
            writer.writerow(_cell(column.value_fn(row)) for column in columns)
            count += 1
    _LOGGER.debug("Wrote %d rows to %s", count, path)


def simulation_columns(n_states: int) -> tuple[ColumnDescription, ...]:
    """t_us, sx, sy, sz, p_1 .. p_N."""
    return (
        ColumnDescription(key="t_us", value_fn=lambda row: row.t_us),
        *(
            ColumnDescription(key=axis, value_fn=lambda row, k=k: row.bloch[k])
            for k, axis in enumerate(AXES)
        ),
        *(
            ColumnDescription(key=f"p_{i + 1}", value_fn=lambda row, i=i: row.populations[i])
            for i in range(n_states)
        ),
    )


def crossover_columns(rate_scale: float) -> tuple[ColumnDescription, ...]:
    """Physical and switching-rate-normalized crossover columns."""
    return (
        ColumnDescription(key="delta_omega", value_fn=lambda p: p.delta_omega),
        ColumnDescription(key="delta_omega_norm", value_fn=lambda p: p.delta_omega / rate_scale),
        ColumnDescription(key="gamma_decay", value_fn=lambda p: p.gamma_decay),
        ColumnDescription(key="gamma_norm", value_fn=lambda p: p.gamma_decay / rate_scale),
        ColumnDescription(key="gamma_asymptotic", value_fn=lambda p: p.gamma_asymptotic),
        ColumnDescription(key="valid", value_fn=lambda p: p.valid),
        ColumnDescription(key="error", value_fn=lambda p: p.error),
    )


def sweep_columns(gamma_rad: float) -> tuple[ColumnDescription, ...]:
    """Ensemble sweep columns; ``*_norm`` columns are divided by gamma."""

    def prep(spin: str, attribute: str) -> Callable[[SweepRow], Any]:
        def value(row: SweepRow) -> Any:
            stats = row.preparations.get(spin)
            return getattr(stats, attribute) if stats is not None else None

        return value

    return (
        ColumnDescription(key="omega_g", value_fn=lambda r: r.omega_g),
        ColumnDescription(key="omega_g_norm", value_fn=lambda r: r.omega_g / gamma_rad),
        ColumnDescription(key="gamma_mean", value_fn=lambda r: r.gamma_mean),
        ColumnDescription(key="gamma_std", value_fn=lambda r: r.gamma_std),
        ColumnDescription(key="gamma_mean_norm", value_fn=lambda r: r.gamma_mean / gamma_rad),
        ColumnDescription(key="gamma_std_norm", value_fn=lambda r: r.gamma_std / gamma_rad),
        ColumnDescription(key="shift_mean", value_fn=lambda r: r.shift_mean),
        ColumnDescription(key="shift_std", value_fn=lambda r: r.shift_std),
        ColumnDescription(key="shift_mean_norm", value_fn=lambda r: r.shift_mean / gamma_rad),
        ColumnDescription(key="shift_std_norm", value_fn=lambda r: r.shift_std / gamma_rad),
        ColumnDescription(key="photons_scattered", value_fn=lambda r: r.photons_scattered),
        ColumnDescription(key="gamma_x_mean", value_fn=prep("+x", "gamma_mean")),
        ColumnDescription(key="gamma_x_std", value_fn=prep("+x", "gamma_std")),
        ColumnDescription(key="gamma_z_mean", value_fn=prep("+z", "gamma_mean")),
        ColumnDescription(key="gamma_z_std", value_fn=prep("+z", "gamma_std")),
        ColumnDescription(key="n_valid", value_fn=lambda r: r.n_valid),
        ColumnDescription(key="n_realizations", value_fn=lambda r: r.n_realizations),
    )


VALIDATION_COLUMNS: tuple[ColumnDescription, ...] = (
    ColumnDescription(key="t_us", value_fn=lambda row: row.t_us),
    *(
        ColumnDescription(key=f"{prefix}_{axis}", value_fn=lambda row, a=attr, k=k: getattr(row, a)[k])
        for prefix, attr in (
            ("me", "exact"),
            ("mc", "sampled"),
            ("se", "stderr"),
            ("dev", "deviation"),
        )
        for k, axis in enumerate(AXES)
    ),
)

COMPENSATION_COLUMNS: tuple[ColumnDescription, ...] = (
    ColumnDescription(key="state", value_fn=lambda row: row.label),
    ColumnDescription(key="excited", value_fn=lambda row: row.excited),
    *(
        ColumnDescription(key=f"{when}_{axis}", value_fn=lambda row, w=when, k=k: getattr(row, w)[k])
        for when in ("before", "after")
        for k, axis in enumerate(("wx", "wy", "wz"))
    ),
)
