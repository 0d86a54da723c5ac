"""
regulator_commands.py
=========================
Subcommands for the real regulator integrals.

Features
--------
- ``psi`` / ``eta``: one parameter point (diagonal, or general with --beta)
- ``psi-scan``: a linspace of alphas, CSV-ready rows
- ``limit-check``: I(1), the half-plane check and the trend toward -16 I(1)
- ``appendix``: the piecewise bound of the |zeta| < eps integral, optionally
  with the log-divergence fit of the alpha -> 2 local integral
"""

from __future__ import annotations

import argparse
from typing import Any

import numpy as np

from k3_regulator_lab.cli.commands.output import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    run_config,
    write_report,
    write_rows,
)
from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.regulator.appendix import appendix_bound_check, estat2_divergence
from k3_regulator_lab.core.regulator.psi import PsiResult, limit_check, psi, regulator_pairing
from k3_regulator_lab.core.validation.schema_validator import PsiRow


def _point(args: argparse.Namespace) -> PsiResult:
    if args.beta is not None:
        return regulator_pairing(KummerModuli(args.alpha, args.beta), args.tol)
    return psi(args.alpha, args.tol, use_general=args.general)


def cmd_psi(args: argparse.Namespace) -> int:
    config = run_config(args)
    result = _point(args)
    columns = ["alpha", "psi", "psi_normalized" if args.normalized else "err_abs"]
    write_rows([result.as_row()], PsiRow, config, text_columns=columns)
    return EXIT_OK if result.converged else EXIT_CHECK_FAILED


def cmd_eta(args: argparse.Namespace) -> int:
    config = run_config(args)
    result = _point(args)
    write_rows([result.as_row()], PsiRow, config, text_columns=["alpha", "eta", "err_abs"])
    vanishes = abs(result.eta) <= max(1e-4, 1e-3 * abs(result.psi))
    verdict = "vanishes" if vanishes else "does NOT vanish"
    logger.info(f"[CLI] eta={result.eta:.3e}: {verdict} within tolerance")
    return EXIT_OK if result.converged else EXIT_CHECK_FAILED


def cmd_psi_scan(args: argparse.Namespace) -> int:
    config = run_config(args)
    alphas = np.linspace(args.start, args.stop, args.steps)
    results = [psi(float(a), args.tol) for a in alphas]
    write_rows([r.as_row() for r in results], PsiRow, config)
    failed = [r.alpha.real for r in results if not r.converged]
    if failed:
        logger.error(f"[CLI] psi-scan: not converged at alpha={failed}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_limit_check(args: argparse.Namespace) -> int:
    config = run_config(args)
    report = limit_check(args.tol, tuple(args.alphas), include_two=args.include_two)
    out: dict[str, Any] = {
        "i_one": report.i_one,
        "i_one_err": report.i_one_err,
        "i_one_upper": report.i_one_upper,
        "half_plane_rel_err": report.half_plane_rel_err,
        "target": report.target,
        "alphas": [r.alpha.real for r in report.trend],
        "psi": [r.psi for r in report.trend],
        "gaps": report.gaps,
        "passed": report.passed,
    }
    if report.substituted_at_two is not None:
        out["psi_substituted_at_two"] = report.substituted_at_two
    write_report(out, config)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_appendix(args: argparse.Namespace) -> int:
    config = run_config(args)
    report = appendix_bound_check(args.eps, args.chi, args.tol)
    out: dict[str, Any] = {
        "eps": report.eps,
        "chi": report.chi,
        "main": report.main,
        "half_disks": report.half_disks,
        "side_disks": report.side_disks,
        "total": report.total,
        "bound": report.bound,
        "pieces_within_bounds": report.pieces_within_bounds,
        "passed": report.passed,
    }
    ok = report.passed and report.converged
    if args.estat2:
        fit = estat2_divergence(tuple(args.chis), args.tol)
        out.update(estat2_chis=fit.chis, estat2_values=fit.values, estat2_slope=fit.slope,
                   estat2_intercept=fit.intercept, estat2_stable=fit.stable)
        ok = ok and fit.stable
    write_report(out, config)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    for name, func, help_text in (
        ("psi", cmd_psi, "psi(alpha) on the diagonal, or the general pairing with --beta"),
        ("eta", cmd_eta, "eta(alpha), which should vanish"),
    ):
        p = subparsers.add_parser(name, help=help_text)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--beta", type=float, default=None, help="general (alpha, beta) point")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--general", action="store_true", help="use the general density at beta = alpha")
        p.add_argument("--normalized", action="store_true", help="show psi divided by the lattice area")
        p.add_argument("--json", action="store_true")
        p.add_argument("--output", default=None)
        p.set_defaults(func=func)

    p = subparsers.add_parser("psi-scan", help="psi and eta over a linspace of alphas")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--csv", default=None, help="write rows to this CSV file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_psi_scan)

    p = subparsers.add_parser("limit-check", help="psi(alpha) -> -16 I(1) as alpha -> 1")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--alphas", type=float, nargs="+", default=[0.9, 0.95, 0.99])
    p.add_argument("--include-two", action="store_true", help="also report the alpha0 = 2 substitution")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_limit_check)

    p = subparsers.add_parser("appendix", help="bound of the |zeta| < eps integral")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--chi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--estat2", action="store_true", help="fit the alpha -> 2 log divergence")
    p.add_argument("--chis", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4])
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_appendix)
