"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from datetime import UTC, datetime
from pathlib import Path

from .commands import COMMAND_DESCRIPTIONS, CommandDescription, CommandResult
from .config import RunConfig, load_run_config
from .const import (
    CONF_DIRECTORY,
    CONF_PLOT,
    CONF_SEED,
    CONF_WORKERS,
    DOMAIN,
    EXIT_OK,
    EXIT_PARTIAL_FAILURE,
    VERSION,
)
from .coordinator import SweepCoordinator
from .envelope import build_envelope
from .exceptions import FluxspinError
from .tables import write_csv

_LOGGER = logging.getLogger(__name__)

COMMANDS_BY_KEY: dict[str, CommandDescription] = {
    description.key: description for description in COMMAND_DESCRIPTIONS
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per command description."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, required=True, help="YAML config or result envelope")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    common.add_argument("--plot", action="store_true", default=None, help="also write an SVG plot")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog=DOMAIN, description="Spin-fluctuator decoherence simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for description in COMMAND_DESCRIPTIONS:
        subparsers.add_parser(
            description.key,
            parents=[common],
            help=description.description,
            description=description.description,
        )
    return parser


def write_outputs(
    config: RunConfig,
    result: CommandResult,
    *,
    started: datetime,
    finished: datetime,
    valid_fraction: float,
) -> list[Path]:
    """Write the table, envelope and optional plot of one run."""
    config.directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if config.write_csv:
        path = config.directory / f"{config.command}.csv"
        write_csv(path, result.columns, result.rows)
        written.append(path)
    if config.write_json:
        path = config.directory / f"{config.command}.json"
        envelope = build_envelope(
            config,
            result.payload,
            started=started,
            finished=finished,
            valid_fraction=valid_fraction,
            errors=result.errors,
        )
        path.write_text(json.dumps(envelope, indent=2, allow_nan=False) + "\n", encoding="utf-8")
        written.append(path)
    if config.plot and result.plot_fn is not None:
        path = config.directory / f"{config.command}.svg"
        result.plot_fn(path)
        written.append(path)
    return written


def run(args: argparse.Namespace) -> int:
    """Execute one parsed command and return its exit code."""
    overrides = {
        CONF_SEED: args.seed,
        CONF_WORKERS: args.workers,
        CONF_PLOT: args.plot,
        CONF_DIRECTORY: str(args.out) if args.out is not None else None,
    }
    config = load_run_config(args.command, args.config, overrides)
    description = COMMANDS_BY_KEY[config.command]

    started = datetime.now(UTC)
    with SweepCoordinator(config.workers) as coordinator:
        result = description.run_fn(config, coordinator)
    finished = datetime.now(UTC)

    for path in write_outputs(
        config,
        result,
        started=started,
        finished=finished,
        valid_fraction=coordinator.valid_fraction,
    ):
        _LOGGER.info("Wrote %s", path)

    if not coordinator.success:
        _LOGGER.warning(
            "%d points failed (%.1f%% valid)",
            coordinator.failed,
            100.0 * coordinator.valid_fraction,
        )
        return EXIT_PARTIAL_FAILURE
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, configure logging and run the command."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return run(args)
    except FluxspinError as err:
        _LOGGER.error("%s", err.message)
        return err.exit_code
    except Exception:
        _LOGGER.exception("Unexpected error")
        return EXIT_PARTIAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
