"""
Auto-discovery & registry for CLI subcommands.

Any module inside ``commands/handlers`` that defines::

    from electrode_soh.commands import Command, CommandSpec, register_command

    @register_command(CommandSpec(name="simulate", help="..."))
    class Simulate(Command):
        def run(self, config): ...

is picked up automatically at import-time. The CLI builds one subparser per
registered spec and dispatches to :meth:`Command.run`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import import_module
import json
import logging
from pathlib import Path
from pkgutil import iter_modules
from typing import Any, Dict, List, Mapping, Tuple, Type

from electrode_soh.config.run import RunConfig

logger = logging.getLogger(__name__)

__all__ = [
    "Command",
    "CommandResult",
    "CommandSpec",
    "get_command",
    "register_command",
    "registered_specs",
    "write_json",
]


@dataclass(slots=True)
class CommandSpec:
    """Static description of a subcommand.

    ``options`` maps a flag to ``(section, key, argparse kwargs)``; the parsed
    value becomes an override of ``section.key``.
    """

    name: str
    help: str
    options: Dict[str, Tuple[str, str, Dict[str, Any]]] = field(default_factory=dict)


@dataclass(slots=True)
class CommandResult:
    """Files a command wrote, in write order."""

    outputs: List[Path] = field(default_factory=list)

    def add(self, path: Path) -> Path:
        self.outputs.append(Path(path))
        return path


class Command:
    """Base class for subcommand handlers."""

    spec: CommandSpec

    def run(self, config: RunConfig) -> CommandResult:
        """Execute the command against a validated configuration."""

        raise NotImplementedError


_registry: dict[str, Type[Command]] = {}
_HANDLERS_IMPORTED = False


def register_command(spec: CommandSpec):
    """Class decorator that binds ``spec`` to the decorated :class:`Command`."""

    def decorator(cls: Type[Command]) -> Type[Command]:
        if not issubclass(cls, Command):
            raise TypeError("register_command expects a Command subclass")
        if spec.name in _registry:
            raise ValueError(f"Command '{spec.name}' already registered")
        cls.spec = spec
        _registry[spec.name] = cls
        return cls

    return decorator


def registered_specs() -> List[CommandSpec]:
    return [entry.spec for entry in _registry.values()]


def get_command(name: str) -> Type[Command] | None:
    """Return the registered :class:`Command` subclass for ``name``."""

    return _registry.get(name)


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    """Write ``payload`` as stable, sorted JSON."""

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info("Wrote %s", path)
    return path


def _import_handlers() -> None:
    """Import every handler module exactly once."""

    global _HANDLERS_IMPORTED
    if _HANDLERS_IMPORTED:
        return

    pkg_path = Path(__file__).resolve().parent / "handlers"
    for _, modname, _ in iter_modules([str(pkg_path)]):
        if modname.startswith("_"):
            continue
        import_module(f"{__name__}.handlers.{modname}")

    _HANDLERS_IMPORTED = True


_import_handlers()
