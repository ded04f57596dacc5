"""Exceptions for the fluxspin simulator."""

from __future__ import annotations

import json
from functools import cache
from importlib import resources
from typing import Any

from .const import (
    DOMAIN,
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_DEGENERACY,
    EXIT_PARTIAL_FAILURE,
)


@cache
def load_strings() -> dict[str, Any]:
    """Load the user-facing texts from strings.json."""
    text = resources.files(DOMAIN).joinpath("strings.json").read_text(encoding="utf-8")
    data: dict[str, Any] = json.loads(text)
    return data


def _exception_messages() -> dict[str, str]:
    return {key: entry["message"] for key, entry in load_strings()["exceptions"].items()}


class FluxspinError(Exception):
    """Base error carrying a translation key and placeholders."""

    translation_key: str = "unexpected"
    exit_code: int = EXIT_PARTIAL_FAILURE

    def __init__(
        self,
        *,
        translation_key: str | None = None,
        translation_placeholders: dict[str, Any] | None = None,
    ) -> None:
        """Initialize the error."""
        if translation_key is not None:
            self.translation_key = translation_key
        self.translation_placeholders = {
            key: str(value) for key, value in (translation_placeholders or {}).items()
        }
        super().__init__(self.message)

    def __reduce__(self) -> tuple[Any, ...]:
        """Pickle through keyword arguments so worker errors survive transfer."""
        return (
            _rebuild_error,
            (type(self), self.translation_key, self.translation_placeholders),
        )

    @property
    def message(self) -> str:
        """Return the rendered message."""
        template = _exception_messages().get(self.translation_key, self.translation_key)
        try:
            return template.format(**self.translation_placeholders)
        except KeyError:
            return f"{template} {self.translation_placeholders}"


def _rebuild_error(
    cls: type[FluxspinError], translation_key: str, placeholders: dict[str, str]
) -> FluxspinError:
    return cls(translation_key=translation_key, translation_placeholders=placeholders)


class ConfigError(FluxspinError):
    """Configuration file is unreadable or violates the schema."""

    translation_key = "config_invalid"
    exit_code = EXIT_CONFIG_ERROR


class InvalidModelError(FluxspinError, ValueError):
    """Fluctuator model or spin input is malformed."""

    translation_key = "invalid_rates"
    exit_code = EXIT_CONFIG_ERROR


class NonErgodicError(InvalidModelError):
    """Classical chain has more than one stationary distribution."""

    translation_key = "non_ergodic"


class ZeroRatesError(InvalidModelError):
    """Multi-state fluctuator without any transitions."""

    translation_key = "zero_rates"


class InvalidStateError(InvalidModelError):
    """Unphysical spin or occupation input."""

    translation_key = "invalid_probabilities"


class InvalidTimeGridError(InvalidModelError):
    """Time grid is unsorted or negative."""

    translation_key = "invalid_time_grid"


class NotSupportedError(FluxspinError):
    """Operation is not defined for this model."""

    translation_key = "two_state_only"


class NumericalDegeneracyError(FluxspinError):
    """Eigenbasis is ill-conditioned or solvers disagree."""

    translation_key = "ill_conditioned"
    exit_code = EXIT_NUMERICAL_DEGENERACY


class InsufficientDataError(FluxspinError):
    """Time series too short for a decay fit."""

    translation_key = "insufficient_data"


class PoorFitError(FluxspinError):
    """Single damped cosine does not describe the series."""

    translation_key = "poor_fit"
