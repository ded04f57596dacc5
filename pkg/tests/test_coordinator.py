"""Tests for the sweep coordinator."""

from __future__ import annotations

import pytest

from fluxspin.coordinator import SweepCoordinator, default_workers
from fluxspin.exceptions import InvalidModelError


def _square(value: int) -> int:
    return value * value


def _fail_on_three(value: int) -> int:
    if value == 3:
        raise InvalidModelError(translation_placeholders={"reason": "three"})
    return value


def test_default_workers_in_range() -> None:
    """Test the CPU count is clamped to at least one worker."""
    assert default_workers() >= 1


@pytest.mark.parametrize("workers", [1, 2])
def test_map_keeps_task_order(workers: int) -> None:
    """Test results come back in task order whatever the pool size."""
    with SweepCoordinator(workers) as coordinator:
        result = coordinator.map(_square, range(25))

    assert result == [value * value for value in range(25)]
    assert coordinator.workers == workers


def test_worker_errors_keep_their_type() -> None:
    """Test errors raised in a worker process arrive intact."""
    with SweepCoordinator(2) as coordinator, pytest.raises(InvalidModelError) as err:
        coordinator.map(_fail_on_three, range(6))

    assert err.value.translation_placeholders == {"reason": "three"}


def test_record_tracks_valid_fraction() -> None:
    """Test the success threshold of 95 percent valid points."""
    coordinator = SweepCoordinator(1)
    assert coordinator.valid_fraction == 1.0
    assert coordinator.success

    coordinator.record([True] * 19 + [False])
    assert coordinator.failed == 1
    assert coordinator.valid_fraction == pytest.approx(0.95)
    assert coordinator.success

    coordinator.record([None])
    assert coordinator.failed == 2
    assert not coordinator.success
