"""Worker pool that fans independent sweep tasks out and gathers them in order."""

from __future__ import annotations

import logging
import multiprocessing
import os
from collections.abc import Callable, Iterable
from types import TracebackType
from typing import TYPE_CHECKING, Any, Self, TypeVar

from .const import MAX_WORKERS, MIN_WORKERS, VALID_POINT_FRACTION

if TYPE_CHECKING:
    from multiprocessing.pool import Pool

_LOGGER = logging.getLogger(__name__)

_T = TypeVar("_T")
_R = TypeVar("_R")


def default_workers() -> int:
    """Machine parallelism clamped to the allowed worker range."""
    return max(MIN_WORKERS, min(os.cpu_count() or MIN_WORKERS, MAX_WORKERS))


class SweepCoordinator:
    """Run independent tasks on a process pool and track failed points.

    Results always come back in task order, so the worker count changes wall
    time only.
    """

    def __init__(self, workers: int | None = None) -> None:
        """Initialize the coordinator."""
        self._workers = default_workers() if workers is None else workers
        self._pool: Pool | None = None
        self._total = 0
        self._failed = 0

    @property
    def workers(self) -> int:
        """Return the configured worker count."""
        return self._workers

    def __enter__(self) -> Self:
        if self._workers > 1:
            self._pool = multiprocessing.get_context().Pool(self._workers)
            _LOGGER.debug("Started pool with %d workers", self._workers)
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()

    def close(self) -> None:
        """Shut the pool down."""
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def map(self, fn: Callable[[_T], _R], items: Iterable[_T]) -> list[_R]:
        """Apply ``fn`` to every item; results are in item order."""
        tasks = list(items)
        if self._pool is None or len(tasks) < 2:
            return [fn(task) for task in tasks]
        chunksize = max(1, len(tasks) // (4 * self._workers))
        return self._pool.map(fn, tasks, chunksize=chunksize)

    def record(self, valid: Iterable[Any]) -> None:
        """Count computed points; falsy entries are failures."""
        for flag in valid:
            self._total += 1
            self._failed += not flag

    @property
    def failed(self) -> int:
        """Number of recorded failed points."""
        return self._failed

    @property
    def valid_fraction(self) -> float:
        """Share of recorded points that were computed."""
        return 1.0 - self._failed / self._total if self._total else 1.0

    @property
    def success(self) -> bool:
        """True when enough points were computed for a clean exit."""
        return self.valid_fraction >= VALID_POINT_FRACTION
