"""Subcommand handler modules."""

# Individual handler modules register themselves by importing
# ``register_command`` from ``electrode_soh.commands``.

__all__ = []
