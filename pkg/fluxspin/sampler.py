"""Random-telegraph trajectories of the fluctuator and the spin they carry.

Every trajectory evolves its Bloch vector by exact rotations about the
precession vector of the current state; decoherence appears only in the
ensemble average.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .data import EnsembleResult, Mapper
from .exceptions import InvalidStateError, InvalidTimeGridError
from .fluctuator import FluctuatorSpec, exit_rates
from .propagator import Occupation, occupation_probabilities
from .quantum import BlochVector, FloatArray, PrecessionVector, rotate_bloch

_LOGGER = logging.getLogger(__name__)

TRAJECTORY_CHUNK: int = 500


@dataclass(frozen=True)
class Trajectory:
    """Sequence of (state, dwell) segments covering at least ``duration``."""

    states: tuple[int, ...]
    dwells: tuple[float, ...]
    duration: float
    seed: int
    absorbed: bool = False

    @property
    def n_jumps(self) -> int:
        """Number of transitions inside the segment list."""
        return len(self.states) - 1

    def segments(self) -> Iterator[tuple[int, float, float]]:
        """Yield (state, start, end) clipped to the readout time."""
        start = 0.0
        for state, dwell in zip(self.states, self.dwells, strict=True):
            end = min(start + dwell, self.duration)
            yield state, start, end
            if end >= self.duration:
                return
            start = end

    def occupancy(self, n_states: int) -> FloatArray:
        """Fraction of the duration spent in each state."""
        time_in_state = np.zeros(n_states)
        for state, start, end in self.segments():
            time_in_state[state] += end - start
        return time_in_state / self.duration


def derive_seed(master: int, *key: int) -> int:
    """Counter-based 64-bit sub-seed for (master, key...)."""
    sequence = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _draw_index(cumulative: FloatArray, u: float) -> int:
    index = int(np.searchsorted(cumulative, u, side="right"))
    if index >= len(cumulative):
        # u landed in the rounding gap above the last partial sum
        index = int(np.flatnonzero(np.diff(cumulative, prepend=0.0) > 0.0)[-1])
    return index


def sample_trajectory(
    spec: FluctuatorSpec, start_state: int, duration: float, seed: int
) -> Trajectory:
    """Sample a continuous-time Markov chain path of the fluctuator."""
    if not 0 <= start_state < spec.n_states:
        raise InvalidStateError(
            translation_key="invalid_state_index",
            translation_placeholders={"index": start_state, "last": spec.n_states - 1},
        )
    if not duration > 0.0 or not math.isfinite(duration):
        raise InvalidTimeGridError(translation_placeholders={"reason": f"duration {duration}"})

    rng = np.random.default_rng(seed)
    exits = exit_rates(spec)
    with np.errstate(divide="ignore", invalid="ignore"):
        jump_cdf = np.cumsum(spec.rates / exits, axis=0)

    states: list[int] = []
    dwells: list[float] = []
    state = start_state
    elapsed = 0.0
    absorbed = False
    while True:
        rate = exits[state]
        if rate == 0.0:
            states.append(state)
            dwells.append(duration - elapsed)
            absorbed = spec.n_states > 1
            break
        dwell = float(rng.exponential(1.0 / rate))
        states.append(state)
        dwells.append(dwell)
        elapsed += dwell
        if elapsed >= duration:
            break
        state = _draw_index(jump_cdf[:, state], float(rng.random()))

    if absorbed:
        _LOGGER.debug(
            "Trajectory with seed %d reached absorbing state %d before t=%g",
            seed,
            state,
            duration,
        )
    return Trajectory(tuple(states), tuple(dwells), float(duration), int(seed), absorbed)


def _omega_table(omegas: Sequence[PrecessionVector] | npt.ArrayLike) -> FloatArray:
    if isinstance(omegas, Sequence) and omegas and isinstance(omegas[0], PrecessionVector):
        return np.array([w.as_array() for w in omegas if isinstance(w, PrecessionVector)])
    return np.asarray(omegas, dtype=np.float64).reshape(-1, 3)


def evolve_bloch(
    traj: Trajectory,
    b0: BlochVector,
    omegas: Sequence[PrecessionVector] | npt.ArrayLike,
) -> BlochVector:
    """Bloch vector at the end of the trajectory."""
    table = _omega_table(omegas)
    s = b0.as_array()
    for state, start, end in traj.segments():
        s = rotate_bloch(s, table[state], end - start)
    return BlochVector.from_array(s, b0.weight)


def _precess_many(s: FloatArray, omega: FloatArray, durations: FloatArray) -> FloatArray:
    rate = float(np.linalg.norm(omega))
    if rate == 0.0:
        return np.tile(s, (durations.size, 1))
    axis = omega / rate
    angle = rate * durations[:, None]
    return (
        s * np.cos(angle)
        + np.cross(axis, s) * np.sin(angle)
        + axis * (axis @ s) * (1.0 - np.cos(angle))
    )


def bloch_series(
    traj: Trajectory,
    b0: BlochVector,
    omegas: Sequence[PrecessionVector] | npt.ArrayLike,
    grid: Sequence[float] | FloatArray,
) -> FloatArray:
    """Bloch vector at each grid time; segments are split exactly at grid times."""
    table = _omega_table(omegas)
    times = np.asarray(grid, dtype=np.float64)
    if times.size and (times[0] < 0.0 or times[-1] > traj.duration or np.any(np.diff(times) < 0)):
        raise InvalidTimeGridError(
            translation_placeholders={"reason": "grid must be sorted within [0, duration]"}
        )

    out = np.empty((times.size, 3))
    s = b0.as_array()
    k = 0
    for state, start, end in traj.segments():
        stop = int(np.searchsorted(times, end, side="left"))
        if stop > k:
            out[k:stop] = _precess_many(s, table[state], times[k:stop] - start)
            k = stop
        s = rotate_bloch(s, table[state], end - start)
    out[k:] = s
    return out


@dataclass(frozen=True)
class _ChunkTask:
    spec: FluctuatorSpec
    spin: BlochVector
    start_cdf: FloatArray
    grid: FloatArray
    seed: int
    indices: range


@dataclass(frozen=True)
class _ChunkMoments:
    count: int
    mean: FloatArray
    m2: FloatArray
    absorbed: int


def _run_chunk(task: _ChunkTask) -> _ChunkMoments:
    duration = float(task.grid[-1])
    table = task.spec.omega_array()
    block = np.empty((len(task.indices), task.grid.size, 3))
    absorbed = 0
    for row, k in enumerate(task.indices):
        start_rng = np.random.default_rng(derive_seed(task.seed, k, 0))
        start_state = _draw_index(task.start_cdf, float(start_rng.random()))
        if duration > 0.0:
            traj = sample_trajectory(task.spec, start_state, duration, derive_seed(task.seed, k, 1))
            absorbed += traj.absorbed
            block[row] = bloch_series(traj, task.spin, table, task.grid)
        else:
            block[row] = task.spin.as_array()
    mean = block.mean(axis=0)
    return _ChunkMoments(len(task.indices), mean, ((block - mean) ** 2).sum(axis=0), absorbed)


def _merge_moments(parts: Iterable[_ChunkMoments]) -> _ChunkMoments:
    merged: _ChunkMoments | None = None
    for part in parts:
        if merged is None:
            merged = part
            continue
        count = merged.count + part.count
        delta = part.mean - merged.mean
        merged = _ChunkMoments(
            count,
            merged.mean + delta * (part.count / count),
            merged.m2 + part.m2 + delta**2 * (merged.count * part.count / count),
            merged.absorbed + part.absorbed,
        )
    assert merged is not None
    return merged


def ensemble_average(
    spec: FluctuatorSpec,
    b0: BlochVector,
    start_occupation: Occupation,
    n_traj: int,
    grid: Sequence[float] | FloatArray,
    seed: int,
    *,
    probabilities: npt.ArrayLike | None = None,
    mapper: Mapper = map,
) -> EnsembleResult:
    """Mean Bloch vector and its standard error over sampled trajectories.

    Trajectory k draws its start state and path from sub-seeds of
    (seed, k), and chunks are merged in index order, so the result does not
    depend on how ``mapper`` schedules the work.
    """
    if n_traj < 2:
        raise InvalidStateError(
            translation_key="invalid_ensemble",
            translation_placeholders={"reason": "at least two trajectories are required"},
        )
    times = np.asarray(grid, dtype=np.float64)
    if times.ndim != 1 or times.size == 0 or times[0] < 0.0 or np.any(np.diff(times) < 0.0):
        raise InvalidTimeGridError(translation_placeholders={"reason": "not sorted ascending"})

    start_cdf = np.cumsum(occupation_probabilities(spec, start_occupation, probabilities))
    tasks = [
        _ChunkTask(spec, b0, start_cdf, times, seed, range(lo, min(lo + TRAJECTORY_CHUNK, n_traj)))
        for lo in range(0, n_traj, TRAJECTORY_CHUNK)
    ]
    _LOGGER.debug("Sampling %d trajectories in %d chunks", n_traj, len(tasks))
    moments = _merge_moments(mapper(_run_chunk, tasks))

    stderr = np.sqrt(moments.m2 / (n_traj - 1) / n_traj)
    if moments.absorbed:
        _LOGGER.warning("%d of %d trajectories were absorbed", moments.absorbed, n_traj)
    return EnsembleResult(
        times=times,
        mean=moments.mean,
        stderr=stderr,
        n_trajectories=n_traj,
        seed=seed,
        n_absorbed=moments.absorbed,
    )
