"""
Run configuration assembled from section defaults, a JSON document, the
environment and command-line overrides.

JSON layout mirrors the section dataclasses with lower-case keys::

    {
      "core": {"scenario": "scenarios/aged_lam20_lam10_lli16.json", "seed": 7},
      "estimator": {"init_soc": 0.6, "measurement_noise": 4e-6},
      "awtls": {"window_s": 1800},
      "solver": {"period_s": 10000}
    }

Precedence (lowest first): section defaults, JSON, ``ESOH_OUTPUT_DIR``, CLI flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping

from electrode_soh.errors import ConfigurationError

from .awtls import Awtls
from .core import Core
from .estimator import Estimator
from .fitting import Fitting
from .simulation import Simulation
from .solver import Solver

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "ESOH_OUTPUT_DIR"

_PATH_FIELDS = ("PARAM_PACK", "SCENARIO", "INPUT", "TRUTH")


@dataclass
class RunConfig:
    """Every setting a command needs, grouped by section."""

    core: Core = field(default_factory=Core)
    estimator: Estimator = field(default_factory=Estimator)
    awtls: Awtls = field(default_factory=Awtls)
    solver: Solver = field(default_factory=Solver)
    simulation: Simulation = field(default_factory=Simulation)
    fitting: Fitting = field(default_factory=Fitting)

    def section_names(self) -> list[str]:
        return [f.name for f in fields(self)]

    def apply(self, section: str, values: Mapping[str, Any]) -> None:
        """Copy ``values`` (lower-case keys) onto ``section``."""

        if section not in self.section_names():
            raise ConfigurationError(f"Unknown config section '{section}'")
        target = getattr(self, section)
        known = {f.name for f in fields(target)}
        for key, value in values.items():
            attr = key.upper()
            if attr not in known:
                raise ConfigurationError(f"Unknown config key '{section}.{key}'")
            default = getattr(target, attr)
            setattr(target, attr, _coerce(f"{section}.{key}", value, default))

    def validate_for(self, command: str) -> None:
        """Check the inputs ``command`` needs are present and resolvable."""

        core = self.core
        for attr in _PATH_FIELDS:
            raw = getattr(core, attr)
            if raw is not None and not Path(raw).exists():
                raise ConfigurationError(f"core.{attr.lower()} does not exist: {raw}")

        if command == "estimate":
            if (core.SCENARIO is None) == (core.INPUT is None):
                raise ConfigurationError(
                    "estimate needs exactly one of core.scenario or core.input"
                )
        elif command == "simulate":
            if core.SCENARIO is None:
                raise ConfigurationError("simulate needs core.scenario")
        elif command == "report":
            if core.INPUT is None:
                raise ConfigurationError("report needs core.input (an estimates CSV)")
        elif command == "fit":
            if self.fitting.ELECTRODE not in ("positive", "negative"):
                raise ConfigurationError(
                    f"fitting.electrode must be 'positive' or 'negative', got {self.fitting.ELECTRODE!r}"
                )
            if self.fitting.MODE not in ("local", "joint"):
                raise ConfigurationError(
                    f"fitting.mode must be 'local' or 'joint', got {self.fitting.MODE!r}"
                )

    @property
    def output_dir(self) -> Path:
        return Path(self.core.OUTPUT_DIR)


def _coerce(name: str, value: Any, default: Any) -> Any:
    """Light type check against the section default."""

    if value is None or default is None:
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigurationError(f"{name} must be a boolean")
        return value
    if isinstance(default, (int, float)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{name} must be numeric")
        return type(default)(value) if isinstance(default, float) else value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigurationError(f"{name} must be a list")
        return list(value)
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigurationError(f"{name} must be a string")
    return value


def load_run_config(
    path: str | os.PathLike | None = None,
    overrides: Mapping[str, Mapping[str, Any]] | None = None,
) -> RunConfig:
    """
    Build a :class:`RunConfig`.

    :param path: Optional JSON run-config file.
    :param overrides: ``{section: {key: value}}`` from CLI flags; ``None`` values are ignored.
    :returns: The merged configuration.
    """

    config = RunConfig()

    if path is not None:
        try:
            document = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigurationError(f"Config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Invalid JSON in {path}: {exc}") from exc
        if not isinstance(document, dict):
            raise ConfigurationError(f"{path} must hold a JSON object")
        for section, values in document.items():
            if not isinstance(values, dict):
                raise ConfigurationError(f"Section '{section}' must be an object")
            config.apply(section, values)
        logger.info("Loaded run config from %s", path)

    env_dir = os.getenv(OUTPUT_DIR_ENV)
    if env_dir:
        config.core.OUTPUT_DIR = env_dir

    for section, values in (overrides or {}).items():
        config.apply(section, {k: v for k, v in values.items() if v is not None})

    return config
