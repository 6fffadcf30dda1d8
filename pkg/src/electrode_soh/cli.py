"""
Command-line entry point.

Global flags may come before or after the subcommand::

    electrode-soh --scenario scenarios/aged_lam20_lam10_lli16.json simulate
    electrode-soh estimate --input results/measurements.csv --plots

Exit codes: 0 success, 2 configuration error, 3 data error, 1 any other
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, Optional, Sequence

from electrode_soh import config  # noqa: F401  (configures logging)
from electrode_soh.commands import get_command, registered_specs
from electrode_soh.config.run import load_run_config
from electrode_soh.errors import ConfigurationError, DataError, ElectrodeSohError

logger = logging.getLogger(__name__)

__all__ = ["build_parser", "run", "main"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3

# flag -> (section, key, argparse kwargs)
_GLOBAL_OPTIONS: Dict[str, tuple[str, str, Dict[str, Any]]] = {
    "--param-pack": ("core", "param_pack", {"help": "Parameter-pack JSON (default: shipped pack)"}),
    "--scenario": ("core", "scenario", {"help": "Scenario JSON for synthetic runs"}),
    "--input": ("core", "input", {"help": "Input CSV"}),
    "--truth": ("core", "truth", {"help": "Truth CSV for plots"}),
    "--output-dir": ("core", "output_dir", {"help": "Directory for results"}),
    "--seed": ("core", "seed", {"type": int, "help": "Seed override"}),
}


def _dest(flag: str) -> str:
    return flag.lstrip("-").replace("-", "_")


def _add_global(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a subparser from clobbering values given before the subcommand
    parser.add_argument("--config", default=argparse.SUPPRESS, help="JSON run config")
    for flag, (_, _, kwargs) in _GLOBAL_OPTIONS.items():
        parser.add_argument(flag, dest=_dest(flag), default=argparse.SUPPRESS, **kwargs)
    parser.add_argument("--plots", action="store_true", default=argparse.SUPPRESS, help="Write SVG charts")
    parser.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="electrode-soh",
        description="Electrode-level state and health estimation toolkit.",
    )
    _add_global(parser)
    sub = parser.add_subparsers(dest="command", required=True)
    for spec in registered_specs():
        child = sub.add_parser(spec.name, help=spec.help, description=spec.help)
        _add_global(child)
        for flag, (_, _, kwargs) in spec.options.items():
            child.add_argument(flag, dest=_dest(flag), default=None, **kwargs)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    values = vars(args)
    overrides: Dict[str, Dict[str, Any]] = {}
    options = dict(_GLOBAL_OPTIONS)
    options.update(get_command(args.command).spec.options)
    for flag, (section, key, _) in options.items():
        value = values.get(_dest(flag))
        if value is not None:
            overrides.setdefault(section, {})[key] = value
    if values.get("plots"):
        overrides.setdefault("core", {})["plots"] = True
    return overrides


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""

    args = build_parser().parse_args(argv)
    if getattr(args, "verbose", False):
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        cfg = load_run_config(getattr(args, "config", None), _overrides(args))
        cfg.validate_for(args.command)
        logger.info("Running '%s' (output: %s)", args.command, cfg.output_dir)
        result = get_command(args.command)().run(cfg)
    except ConfigurationError as exc:
        logger.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except DataError as exc:
        logger.error("Data error: %s", exc)
        return EXIT_DATA
    except ElectrodeSohError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return EXIT_FAILURE

    logger.info("'%s' finished; wrote %d file(s)", args.command, len(result.outputs))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
