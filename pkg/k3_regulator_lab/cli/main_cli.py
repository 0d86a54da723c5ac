"""
main_cli.py
=========================
Command-line entry point of the K3 regulator lab.

Features
--------
- One subcommand per computation (psi, eta, psi-scan, limit-check,
  appendix, kummer, pf, kappa) plus ``verify``
- Results on stdout (text, CSV or JSON), logs on stderr via Loguru
- Exit codes: 0 success, 1 check failure, 2 usage or domain error
"""

from __future__ import annotations

import argparse
from typing import Sequence

from pydantic import ValidationError

from k3_regulator_lab.cli.commands import geometry_commands, regulator_commands, verify_command
from k3_regulator_lab.cli.commands.output import EXIT_CHECK_FAILED, EXIT_USAGE
from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import ConvergenceError, LabError, OutputValidationError


def create_parser() -> argparse.ArgumentParser:
    """
    Create and configure the argument parser.

    Returns
    -------
    argparse.ArgumentParser
        Parser with every subcommand registered.
    """
    parser = argparse.ArgumentParser(
        prog="k3-lab",
        description="Numerical laboratory for regulator integrals, Picard-Fuchs operators "
        "and the transcendental regulator of a rank-20 K3 surface.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    regulator_commands.register(subparsers)
    geometry_commands.register(subparsers)
    verify_command.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, dispatch the subcommand and map failures to exit codes."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed usage; --help exits with 0
        return int(e.code or 0)
    try:
        return int(args.func(args))
    except ValidationError as e:
        logger.error(f"[CLI] Invalid parameters: {e}")
        parser.print_usage()
        return EXIT_USAGE
    except (OutputValidationError, ConvergenceError) as e:
        logger.error(f"[CLI] {args.command} failed: {e}")
        return EXIT_CHECK_FAILED
    except (LabError, ValueError) as e:
        logger.error(f"[CLI] {args.command}: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"[CLI] Cannot write output: {e}")
        return EXIT_USAGE


def run() -> None:
    """Console-script entry point."""
    raise SystemExit(main())


if __name__ == "__main__":
    run()
