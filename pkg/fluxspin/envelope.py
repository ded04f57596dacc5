"""Structured result envelope written next to every table."""

from __future__ import annotations

import dataclasses
import math
import platform
from datetime import datetime
from enum import Enum
from typing import Any

import matplotlib
import numpy as np
import scipy

from .config import RunConfig
from .const import DOMAIN, ENVELOPE_SCHEMA_VERSION, VERSION


def to_jsonable(value: Any) -> Any:
    """Convert results into plain JSON types; non-finite floats become None."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            f.name: to_jsonable(getattr(value, f.name))
            for f in dataclasses.fields(value)
            if f.repr
        }
    if isinstance(value, tuple) and hasattr(value, "_asdict"):
        return {key: to_jsonable(item) for key, item in value._asdict().items()}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, list | tuple | range):
        return [to_jsonable(item) for item in value]
    if isinstance(value, complex | np.complexfloating):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    return value


def build_envelope(
    config: RunConfig,
    payload: Any,
    *,
    started: datetime,
    finished: datetime,
    valid_fraction: float,
    errors: list[str],
) -> dict[str, Any]:
    """Assemble the result envelope of one run."""
    return {
        "schema_version": ENVELOPE_SCHEMA_VERSION,
        "tool": {"name": DOMAIN, "version": VERSION},
        "command": config.command,
        "config": to_jsonable(config.as_dict()),
        "metadata": {
            "started": started.isoformat(),
            "finished": finished.isoformat(),
            "wall_seconds": (finished - started).total_seconds(),
            "workers": config.workers,
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "matplotlib": matplotlib.__version__,
            },
        },
        "valid_fraction": valid_fraction,
        "errors": errors,
        "payload": to_jsonable(payload),
    }
