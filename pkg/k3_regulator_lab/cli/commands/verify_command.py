"""
verify_command.py
=========================
The ``verify`` subcommand: run acceptance suites and print the pass/fail table.
"""

from __future__ import annotations

import argparse
import sys

from k3_regulator_lab.cli.commands.output import EXIT_OK, EXIT_USAGE, run_config, write_rows
from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.pipeline.orchestration import run_verification
from k3_regulator_lab.core.suites.registry import SuiteRegistry
from k3_regulator_lab.core.validation.schema_validator import SuiteRow


def cmd_verify(args: argparse.Namespace) -> int:
    registry = SuiteRegistry()
    if args.list:
        for name in registry.names:
            sys.stdout.write(f"{name}\n")
        return EXIT_OK
    if not args.all and not args.suite:
        logger.error("[CLI] verify needs --all or --suite NAME")
        sys.stderr.write("verify: give --all or --suite NAME (see --list)\n")
        return EXIT_USAGE
    config = run_config(args)
    run = run_verification(None if args.all else args.suite, seed=config.seed, registry=registry)
    write_rows([r.as_row() for r in run.results], SuiteRow, config)
    return run.exit_code


def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("verify", help="run the acceptance suites")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", help="every suite plus the full-run criterion")
    group.add_argument("--suite", nargs="+", default=None, help="suite names (see --list)")
    p.add_argument("--list", action="store_true", help="list suite names and exit")
    p.add_argument("--seed", type=int, default=settings.random_seed)
    p.add_argument("--json", action="store_true")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_verify)
