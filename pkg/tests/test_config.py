"""Tests for configuration loading and validation."""

from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from fluxspin.config import load_run_config, read_config_file, validate_config
from fluxspin.const import (
    DEFAULT_GRID_POINTS,
    DEFAULT_MC_GRID_POINTS,
    DEFAULT_N_TRAJECTORIES,
    DEFAULT_OUTPUT_DIRECTORY,
)
from fluxspin.exceptions import ConfigError


def test_simulate_defaults(model_config: dict[str, Any]) -> None:
    """Test omitted sections are filled with their defaults."""
    config = validate_config("simulate", {"schema_version": 1, "seed": 3, "model": model_config})

    assert config.command == "simulate"
    assert config.seed == 3
    assert config.workers >= 1
    assert config.directory == Path(DEFAULT_OUTPUT_DIRECTORY)
    assert config.write_csv
    assert config.write_json
    assert not config.plot
    assert config.parameters["spin"] == "+x"
    assert config.parameters["occupation"] == {"mode": "ground_only"}
    assert config.parameters["grid"] == {"start": 0.0, "points": DEFAULT_GRID_POINTS}


def test_mc_validate_defaults(model_config: dict[str, Any]) -> None:
    """Test the Monte Carlo grid and trajectory count defaults."""
    config = validate_config("mc-validate", {"schema_version": 1, "model": model_config})

    assert config.parameters["grid"]["points"] == DEFAULT_MC_GRID_POINTS
    assert config.parameters["n_trajectories"] == DEFAULT_N_TRAJECTORIES


def test_seed_is_drawn_when_missing() -> None:
    """Test a missing seed is replaced by a recorded random one."""
    config = validate_config("crossover", {"schema_version": 1})

    assert isinstance(config.seed, int)
    assert 0 <= config.seed < 2**63
    assert config.as_dict()["seed"] == config.seed


def test_missing_schema_version() -> None:
    """Test schema_version is required."""
    with pytest.raises(ConfigError) as err:
        validate_config("crossover", {})

    assert err.value.translation_key == "config_invalid"
    assert err.value.translation_placeholders["path"] == "schema_version"


def test_schema_version_string_is_coerced() -> None:
    """Test a quoted version number is accepted like the integer."""
    config = validate_config("crossover", {"schema_version": "1", "seed": 4})

    assert config.seed == 4
    assert config.as_dict()["schema_version"] == 1


@pytest.mark.parametrize("version", [2, "2", 0])
def test_unsupported_schema_version(version: Any) -> None:
    """Test other config versions are refused."""
    with pytest.raises(ConfigError) as err:
        validate_config("crossover", {"schema_version": version})

    assert err.value.translation_key == "config_version"
    assert "expected 1" in err.value.message


def test_unknown_key_is_rejected() -> None:
    """Test typos do not pass silently."""
    with pytest.raises(ConfigError) as err:
        validate_config("crossover", {"schema_version": 1, "bogus": 1})

    assert err.value.translation_placeholders["path"] == "bogus"


@pytest.mark.parametrize(
    ("command", "data"),
    [
        ("simulate", {"model": {"rates": [[0.0, -1.0], [1.0, 0.0]], "omegas": [[0, 0, 1], [0, 0, 1]]}}),
        ("simulate", {"model": {"rates": [[0.0]], "omegas": [[0, 0]]}}),
        ("simulate", {"model": {"rates": [[0.0]], "omegas": [[0, 0, 1]]}, "spin": "+w"}),
        ("crossover", {"template": {"rate_ba": 0.0}}),
        ("fig2", {"grid": {"stop": 0.3}}),
        ("fig2", {"ensemble": {"n_states": 1}}),
        ("mc-validate", {"model": {"rates": [[0.0]], "omegas": [[0, 0, 1]]}, "n_trajectories": 1}),
        ("sweetspot", {"model": {"rates": [[0.0]], "omegas": [[0, 0, 1]]}, "excited_states": []}),
        ("crossover", {"workers": 0}),
    ],
)
def test_invalid_sections(command: str, data: dict[str, Any]) -> None:
    """Test schema violations map to configuration errors."""
    with pytest.raises(ConfigError) as err:
        validate_config(command, {"schema_version": 1, **data})

    assert err.value.exit_code == 2


def test_overrides_take_precedence(model_config: dict[str, Any]) -> None:
    """Test command-line values replace the file and None leaves it alone."""
    data = {
        "schema_version": 1,
        "seed": 1,
        "workers": 4,
        "model": model_config,
        "output": {"directory": "from-file", "formats": ["csv"]},
    }

    config = validate_config(
        "simulate", data, {"seed": 9, "workers": None, "plot": True, "directory": "cli"}
    )

    assert config.seed == 9
    assert config.workers == 4
    assert config.plot
    assert config.directory == Path("cli")
    assert config.formats == ("csv",)
    assert not config.write_json


def test_load_yaml_file(
    write_config: Callable[..., Path], model_config: dict[str, Any]
) -> None:
    """Test a YAML file on disk."""
    path = write_config({"schema_version": 1, "seed": 5, "model": model_config})

    config = load_run_config("sweetspot", path)

    assert config.seed == 5
    assert config.parameters["model"]["rates"] == model_config["rates"]


def test_envelope_replays_its_config(tmp_path: Path, model_config: dict[str, Any]) -> None:
    """Test the config echoed in a result envelope validates to the same run."""
    original = validate_config(
        "simulate", {"schema_version": 1, "seed": 12, "workers": 1, "model": model_config}
    )
    envelope = {"schema_version": 1, "config": original.as_dict(), "payload": {}}
    path = tmp_path / "simulate.json"
    path.write_text(json.dumps(envelope), encoding="utf-8")

    replayed = load_run_config("simulate", path)

    assert replayed == original


def test_json_exponent_floats_are_numbers(tmp_path: Path) -> None:
    """Test small floats written by json survive the reload."""
    path = tmp_path / "crossover.json"
    path.write_text(
        json.dumps({"config": {"schema_version": 1, "grid": {"start": 1e-05}}, "payload": {}}),
        encoding="utf-8",
    )

    config = load_run_config("crossover", path)

    assert config.parameters["grid"]["start"] == 1e-05


def test_unreadable_file(tmp_path: Path) -> None:
    """Test a missing file is a configuration error."""
    with pytest.raises(ConfigError) as err:
        read_config_file(tmp_path / "missing.yaml")

    assert err.value.translation_key == "config_unreadable"


def test_non_mapping_file(write_config: Callable[..., Path]) -> None:
    """Test the top level must be a mapping."""
    with pytest.raises(ConfigError):
        read_config_file(write_config([1, 2, 3]))


def test_empty_file_needs_schema_version(tmp_path: Path) -> None:
    """Test an empty file reads as an empty mapping."""
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")

    assert read_config_file(path) == {}
    with pytest.raises(ConfigError):
        load_run_config("crossover", path)
