"""Gradcheck command."""

import argparse

import structlog

from commands.base import Command
from fgfgan.gradcheck_suite import GRADCHECK_TOLERANCE, run_gradcheck_suite

logger = structlog.get_logger(__name__)


class GradcheckCommand(Command):
    name = "gradcheck"
    help = "finite-difference check of every layer family in 64-bit"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--seed", type=int, default=0, help="seed for inputs and sampled entries (default: 0)")
        parser.add_argument(
            "--tolerance",
            type=float,
            default=GRADCHECK_TOLERANCE,
            help=f"maximum allowed relative error (default: {GRADCHECK_TOLERANCE})",
        )

    def execute(self, args: argparse.Namespace) -> int:
        results = run_gradcheck_suite(args.seed)
        for family, error in results.items():
            print(f"{family} {error:.3e}")
        failed = [family for family, error in results.items() if not error < args.tolerance]
        if failed:
            logger.error("gradcheck_failed", families=failed, tolerance=args.tolerance)
            return 1
        return 0
