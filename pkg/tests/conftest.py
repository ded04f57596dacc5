"""Fixtures for fluxspin tests."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import pytest
import yaml

from fluxspin.fluctuator import FluctuatorSpec
from fluxspin.quantum import PrecessionVector


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded generator so random specs are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def dephasing_spec() -> Callable[[float, float], FluctuatorSpec]:
    """Symmetric two-state pure dephaser: rate r each way, +-delta along z."""

    def build(rate: float, delta: float) -> FluctuatorSpec:
        return FluctuatorSpec.two_state(
            rate,
            rate,
            PrecessionVector(0.0, 0.0, delta),
            PrecessionVector(0.0, 0.0, -delta),
        )

    return build


@pytest.fixture
def random_spec(rng: np.random.Generator) -> Callable[..., FluctuatorSpec]:
    """Random fully connected N-state fluctuator."""

    def build(
        n_states: int, rate_scale: float = 1.0, omega_scale: float = 1.0
    ) -> FluctuatorSpec:
        rates = rate_scale * rng.uniform(0.2, 1.0, size=(n_states, n_states))
        omegas = tuple(
            PrecessionVector.from_array(row)
            for row in omega_scale * rng.normal(size=(n_states, 3))
        )
        return FluctuatorSpec(rates, omegas)

    return build


@pytest.fixture
def three_state_spec() -> FluctuatorSpec:
    """Small three-state model used by the command tests."""
    return FluctuatorSpec(
        np.array([[0.0, 1.0, 0.5], [0.8, 0.0, 0.7], [0.4, 0.6, 0.0]]),
        (
            PrecessionVector(0.0, 0.0, 1.0),
            PrecessionVector(0.5, 0.0, 1.5),
            PrecessionVector(0.0, -0.4, 0.6),
        ),
    )


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[dict[str, Any]], Path]:
    """Write a YAML config into the test directory and return its path."""

    def write(data: dict[str, Any], name: str = "config.yaml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path

    return write


@pytest.fixture
def model_config() -> dict[str, Any]:
    """Model section of the three-state spec in config form."""
    return {
        "rates": [[0.0, 1.0, 0.5], [0.8, 0.0, 0.7], [0.4, 0.6, 0.0]],
        "omegas": [[0.0, 0.0, 1.0], [0.5, 0.0, 1.5], [0.0, -0.4, 0.6]],
    }
