"""SVG figures with physical and normalized axes."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .const import DOMAIN  # noqa: E402
from .data import CrossoverCurve, SimulationSample, SweepResult, ValidationSample  # noqa: E402
from .tables import AXES  # noqa: E402

if TYPE_CHECKING:
    from matplotlib.axes import Axes
    from matplotlib.figure import Figure

_LOGGER = logging.getLogger(__name__)

SWITCHING_LABEL = "(1/r_max)"

# stable element ids so identical runs give identical files
matplotlib.rcParams["svg.hashsalt"] = DOMAIN


def _save(fig: Figure, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    _LOGGER.debug("Wrote plot %s", path)


def _scaled_axes(ax: Axes, x_scale: float | None, y_scale: float | None, label: str) -> None:
    if x_scale:
        top = ax.secondary_xaxis(
            "top", functions=(lambda x: x / x_scale, lambda x: x * x_scale)
        )
        top.set_xlabel(f"{ax.get_xlabel()} / {label}")
    if y_scale:
        right = ax.secondary_yaxis(
            "right", functions=(lambda y: y / y_scale, lambda y: y * y_scale)
        )
        right.set_ylabel(f"{ax.get_ylabel()} / {label}")


def plot_bloch_series(
    path: Path,
    samples: Sequence[SimulationSample],
    title: str,
    switching_time: float | None = None,
) -> None:
    """Reduced Bloch components against time, also in units of ``switching_time``."""
    fig, ax = plt.subplots(figsize=(7, 4))
    times = [s.t_us for s in samples]
    for k, axis in enumerate(AXES):
        ax.plot(times, [s.bloch[k] for s in samples], label=axis)
    ax.set_xlabel("t (us)")
    ax.set_ylabel("Bloch component")
    ax.set_title(title)
    ax.legend()
    _scaled_axes(ax, switching_time, None, SWITCHING_LABEL)
    _save(fig, path)


def plot_crossover(path: Path, curve: CrossoverCurve) -> None:
    """Decay rate against differential frequency with the fast-limit line."""
    fig, ax = plt.subplots(figsize=(7, 5))
    valid = [p for p in curve.points if p.valid and p.delta_omega > 0.0]
    dw = np.array([p.delta_omega for p in valid])
    ax.loglog(dw, [p.gamma_decay for p in valid], "o-", label="exact")
    ax.loglog(dw, [p.gamma_asymptotic for p in valid], "--", label="fast limit")
    ax.set_xlabel("dw (rad/us)")
    ax.set_ylabel("Gamma (1/us)")
    ax.legend()
    _scaled_axes(ax, curve.rate_scale, curve.rate_scale, "r_tot")
    _save(fig, path)


def plot_sweep(path: Path, result: SweepResult) -> None:
    """Both sweep panels: decay rate and precession-frequency shift."""
    gamma = result.gamma_rad
    fig, (rate_ax, shift_ax) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
    rows = [r for r in result.rows if r.n_valid]
    omega_g = np.array([r.omega_g for r in rows])
    gamma_mean = np.array([r.gamma_mean for r in rows])
    gamma_std = np.array([r.gamma_std for r in rows])
    shift_mean = np.array([r.shift_mean for r in rows])
    shift_std = np.array([r.shift_std for r in rows])

    rate_ax.plot(omega_g, gamma_mean, "-")
    rate_ax.plot(omega_g, gamma_mean + gamma_std, "--", color="grey")
    rate_ax.plot(omega_g, gamma_mean - gamma_std, "--", color="grey")
    rate_ax.axhline(result.gamma0, linestyle=":", color="black", label="Gamma_0")
    rate_ax.set_ylabel("Gamma (1/us)")
    rate_ax.legend()

    shift_ax.plot(omega_g, shift_mean, "-")
    shift_ax.plot(omega_g, shift_mean + shift_std, "--", color="grey")
    shift_ax.plot(omega_g, shift_mean - shift_std, "--", color="grey")
    shift_ax.set_xlabel("omega_g (rad/us)")
    shift_ax.set_ylabel("shift (rad/us)")

    _scaled_axes(rate_ax, gamma, gamma, "gamma")
    _scaled_axes(shift_ax, None, gamma, "gamma")
    _save(fig, path)


def plot_validation(
    path: Path, samples: Sequence[ValidationSample], switching_time: float | None = None
) -> None:
    """Master-equation lines with Monte Carlo points and error bars."""
    fig, ax = plt.subplots(figsize=(7, 4))
    times = [s.t_us for s in samples]
    for k, axis in enumerate(AXES):
        (line,) = ax.plot(times, [s.exact[k] for s in samples], label=f"{axis} exact")
        ax.errorbar(
            times,
            [s.sampled[k] for s in samples],
            yerr=[s.stderr[k] for s in samples],
            fmt=".",
            color=line.get_color(),
            label=f"{axis} sampled",
        )
    ax.set_xlabel("t (us)")
    ax.set_ylabel("Bloch component")
    ax.legend()
    _scaled_axes(ax, switching_time, None, SWITCHING_LABEL)
    _save(fig, path)


def plot_compensation(
    path: Path,
    times: np.ndarray,
    series: dict[str, np.ndarray],
    switching_time: float | None = None,
) -> None:
    """Bloch vector length with and without the compensating field."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, values in series.items():
        ax.plot(times, np.linalg.norm(values, axis=1), label=name)
    ax.set_xlabel("t (us)")
    ax.set_ylabel("|s|")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    _scaled_axes(ax, switching_time, None, SWITCHING_LABEL)
    _save(fig, path)
