"""Command-line front end of ietjoinings."""

from .commands import HANDLERS, CommandContext, CommandOutput
from .parser import COMMANDS, UsageError, build_parser
from .runner import EXIT_ERROR, EXIT_OK, EXIT_UNVERIFIED, main, run_command

__all__ = [
    "COMMANDS",
    "EXIT_ERROR",
    "EXIT_OK",
    "EXIT_UNVERIFIED",
    "HANDLERS",
    "CommandContext",
    "CommandOutput",
    "UsageError",
    "build_parser",
    "main",
    "run_command",
]
