"""Command-line entry point for the pansharpening pipeline.

Usage: ``python src/cli.py <command> [flags]``. Exit codes: 0 success,
1 runtime failure (one-line diagnostic on stderr), 2 usage error.
"""

import argparse
import sys
from typing import Dict, List, Optional, Sequence

import structlog
from pydantic import ValidationError

from commands import (
    AblateCommand,
    Command,
    EvalCommand,
    FuseCommand,
    GradcheckCommand,
    ParamsCommand,
    PrepareCommand,
    SelectKCommand,
    SynthCommand,
    TrainCommand,
)
from config.logging_config import configure_logging
from config.settings import Settings
from errors import FGFGANError

logger = structlog.get_logger(__name__)


class PansharpenCLI:
    """Registers the subcommands and dispatches one invocation."""

    def __init__(self, settings: Settings, commands: Optional[Sequence[Command]] = None):
        """Initialize the CLI.

        Args:
            settings: Process settings (log level and format)
            commands: Subcommands to register; defaults to the full pipeline
        """
        self.settings = settings
        self.commands: Dict[str, Command] = {}
        for command in commands if commands is not None else self._default_commands():
            self.commands[command.name] = command
        self.parser = self._build_parser()

    @staticmethod
    def _default_commands() -> List[Command]:
        return [
            PrepareCommand(),
            SynthCommand(),
            TrainCommand(),
            FuseCommand(),
            EvalCommand(),
            ParamsCommand(),
            GradcheckCommand(),
            AblateCommand(),
            SelectKCommand(),
        ]

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="fgfgan",
            description="Guided-filter GAN pansharpening: data prep, training, fusion and evaluation.",
        )
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
        for name, command in self.commands.items():
            sub = subparsers.add_parser(
                name,
                help=command.help,
                description=command.help,
            )
            command.add_arguments(sub)
        return parser

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Parse ``argv`` and execute the chosen command.

        Returns:
            Process exit code; argparse exits with 2 itself on usage errors
        """
        args = self.parser.parse_args(argv)
        command = self.commands[args.command]
        try:
            return command.execute(args)
        except (FGFGANError, ValidationError, OSError) as e:
            message = " ".join(str(e).split())
            logger.error("command_failed", command=args.command, error=message, kind=type(e).__name__)
            print(f"fgfgan {args.command}: {message}", file=sys.stderr)
            return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    settings = Settings()
    configure_logging(settings)
    return PansharpenCLI(settings).run(argv)


if __name__ == "__main__":
    sys.exit(main())
