"""
output.py
=========================
Shared output plumbing of the subcommands: the run configuration built from
flags and the text / CSV / JSON writers (results on stdout, logs on stderr).
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Sequence, Type

import pandas as pd
from pydantic import BaseModel

from k3_regulator_lab.core.utils.serialization import FLOAT_FORMAT, emit_csv, emit_json, to_plain
from k3_regulator_lab.core.validation.schema_validator import RunConfig, validate_rows

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def run_config(args: argparse.Namespace) -> RunConfig:
    """Validated run parameters of a parsed command line."""
    if getattr(args, "json", False):
        fmt = "json"
    elif getattr(args, "csv", None):
        fmt = "csv"
    else:
        fmt = "text"
    values: dict[str, Any] = {"command": args.command, "output_format": fmt}
    for flag, field in (("tol", "rel_tol"), ("rel_tol", "rel_tol"), ("precision", "precision"),
                        ("dps", "dps"), ("seed", "seed")):
        value = getattr(args, flag, None)
        if value is not None:
            values[field] = value
    path = getattr(args, "csv", None) or getattr(args, "output", None)
    if path is not None:
        values["output_path"] = str(path)
    return RunConfig(**values)


def write_text(frame: pd.DataFrame, title: str | None = None) -> None:
    if title:
        sys.stdout.write(f"{title}\n")
    sys.stdout.write(frame.to_string(index=False, float_format=lambda v: FLOAT_FORMAT % v) + "\n")


def write_rows(
    rows: Sequence[dict[str, Any]],
    model: Type[BaseModel],
    config: RunConfig,
    text_columns: Sequence[str] | None = None,
    title: str | None = None,
) -> None:
    """
    Validate ``rows`` and write them in the configured format.

    Raises
    ------
    OutputValidationError
        If a row holds NaN or Inf.
    OSError
        If the output path cannot be written.
    """
    clean = validate_rows(rows, model)
    schema = list(model.model_fields)
    if config.output_format == "csv":
        emit_csv(clean, schema, config.output_path)
    elif config.output_format == "json":
        emit_json(clean, config.output_path)
    else:
        frame = pd.DataFrame(clean, columns=schema)
        write_text(frame[list(text_columns)] if text_columns else frame, title)


def write_report(report: dict[str, Any], config: RunConfig) -> None:
    """Nested report: JSON when asked for, otherwise ``key: value`` lines."""
    if config.output_format == "json":
        emit_json(report, config.output_path)
        return
    for key, value in to_plain(report).items():
        sys.stdout.write(f"{key}: {value}\n")
