"""
geometry_commands.py
=========================
Subcommands for the Kummer geometry, the Picard-Fuchs checks and kappa.
"""

from __future__ import annotations

import argparse
from typing import Any

import mpmath

from k3_regulator_lab.cli.commands.output import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    run_config,
    write_report,
    write_rows,
)
from k3_regulator_lab.core.kummer.census import singular_fibers
from k3_regulator_lab.core.kummer.fiber import special_point_table
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.numerics.types import PrecisionMode, is_infinite
from k3_regulator_lab.core.picardfuchs.checks import (
    decoupled_residual_table,
    tensor_product_check,
    two_isogeny_check,
)
from k3_regulator_lab.core.picardfuchs.operators import PFSuite
from k3_regulator_lab.core.shioda.kappa import (
    kappa,
    kappa_at_two_precisions,
    kappa_cf_report,
    kappa_dual_strategy_check,
)
from k3_regulator_lab.core.validation.schema_validator import KappaRow, SpecialPointRowModel

PF_SUITES = ("decoupled", "cubic", "quartic", "tensor", "isogeny", "operators")
_TRANSCRIPTIONS = {"cubic": "cubic_Yt", "quartic": "quartic_sigma1"}


def _fmt(value: Any) -> str:
    if is_infinite(value):
        return "inf"
    z = complex(value)
    return repr(z.real) if z.imag == 0 else repr(z)


def cmd_kummer(args: argparse.Namespace) -> int:
    config = run_config(args)
    m = KummerModuli(args.alpha, args.beta)
    census = singular_fibers(m)
    report: dict[str, Any] = {
        "alpha": args.alpha,
        "beta": args.beta,
        "census": [{"mu": _fmt(e.mu), "type": e.kodaira_type} for e in census.entries],
        "cycle_valid": m.cycle_valid,
    }
    ok = True
    if args.table:
        rows = [
            {
                "label": r.label,
                "gamma_squared": _fmt(r.gamma_squared),
                "xi": _fmt(r.xi),
                "x": _fmt(r.xy[0]),
                "y": _fmt(r.xy[1]),
                "error": r.error,
            }
            for r in special_point_table(m)
        ]
        ok = all(r["error"] < 1e-12 for r in rows)
        if config.output_format == "json":
            report["special_points"] = rows
        else:
            write_rows(rows, SpecialPointRowModel, config, title="special points")
    write_report(report, config)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_pf(args: argparse.Namespace) -> int:
    config = run_config(args)
    suites = args.suite or list(PF_SUITES)
    report: dict[str, Any] = {}
    ok = True
    if "decoupled" in suites:
        table = decoupled_residual_table(tuple(args.js))
        best = table.drop(columns="j").min(axis=1)
        report["decoupled"] = table.to_dict(orient="records")
        ok = ok and bool((best < 1e-5).all())
    if "tensor" in suites:
        tensor = tensor_product_check()
        control = tensor_product_check(partner="exp")
        report["tensor"] = {"max_residual": tensor.max_residual, "control": control.max_residual}
        ok = ok and tensor.passed and control.max_residual > 1e-3
    if "isogeny" in suites:
        entries = []
        for y in args.ys:
            r = two_isogeny_check(y)
            entries.append(
                {"y": y, "hauptmodul": r.hauptmodul, "passing_scalings": r.passing_scalings,
                 "t": [m.t for m in r.matches]}
            )
        report["isogeny"] = entries
        consistent = len({tuple(e["passing_scalings"]) for e in entries}) == 1
        ok = ok and consistent and bool(entries[0]["passing_scalings"])
    pf = PFSuite.build()
    for suite, name in _TRANSCRIPTIONS.items():
        if suite in suites:
            ode = pf.get(name)
            report[suite] = {
                "singular_points": [_fmt(p) for p in ode.singular_points()],
                "coefficients": pf.coefficient_table(name, args.points).to_dict(orient="records"),
            }
    if "operators" in suites:
        report["operators"] = {
            name: pf.coefficient_table(name, args.points).to_dict(orient="records") for name in pf.names
        }
    write_report(report, config)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_kappa(args: argparse.Namespace) -> int:
    config = run_config(args)
    first, second = kappa_at_two_precisions(config.rel_tol, config.precision, config.dps, kappa)
    cf = kappa_cf_report([first, second], args.cf_terms)
    row = {
        "kappa": float(first.kappa),
        "numerator": float(first.numerator),
        "denominator": float(first.denominator),
        "err_kappa": first.err_kappa,
        "transcendental_period": float(first.transcendental_period),
        "precision": first.precision.value,
        "dps": first.dps,
    }
    report: dict[str, Any] = {
        **row,
        "kappa_digits": mpmath.nstr(first.kappa, first.dps or 17) if first.dps else repr(first.kappa),
        "continued_fraction": list(cf.stable_terms),
        "stable_terms": cf.stable_count,
        "disclaimer": cf.disclaimer,
    }
    ok = True
    if args.dual:
        dual = kappa_dual_strategy_check(config.rel_tol)
        report["truncation_kappa"] = float(dual.truncation.kappa)
        report["strategy_rel_diff"] = dual.rel_diff
        ok = dual.passed
    if config.output_format == "json":
        write_report(report, config)
    else:
        write_rows([row], KappaRow, config)
        write_report({k: v for k, v in report.items() if k not in row}, config)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("kummer", help="fiber census and special-point table")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--table", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_kummer)

    p = subparsers.add_parser("pf", help="Picard-Fuchs residual checks and coefficient tables")
    p.add_argument("--suite", nargs="+", choices=PF_SUITES, default=None)
    p.add_argument("--js", type=float, nargs="+", default=[2.0, 5.0, 10.0])
    p.add_argument("--ys", type=float, nargs="+", default=[1.1, 1.3, 1.5, 1.7, 2.0])
    p.add_argument("--points", type=float, nargs="+", default=[0.25, 0.5, 2.0])
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_pf)

    p = subparsers.add_parser("kappa", help="the transcendental regulator constant kappa")
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-8)
    p.add_argument("--precision", choices=[m.value for m in PrecisionMode], default="double")
    p.add_argument("--dps", type=int, default=None)
    p.add_argument("--cf-terms", dest="cf_terms", type=int, default=40)
    p.add_argument("--dual", action="store_true", help="also run the truncation strategy")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_kappa)
