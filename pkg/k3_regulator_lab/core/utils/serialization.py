"""
serialization.py
=========================
Output and filesystem helpers for the lab's tables and reports.

Features
--------
- CSV with a fixed schema, 17 significant digits, header always written
- JSON mirroring the CSV fields (dataclasses, numpy and mpmath scalars converted)
- YAML loading for the packaged acceptance parameters
- CSV reading back with round-trip float parsing
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

import mpmath
import numpy as np
import pandas as pd
import yaml

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import OutputValidationError

FLOAT_FORMAT = "%.17g"


def ensure_dir(path: str | Path) -> Path:
    """
    Ensure directory exists (create parents if needed).

    Parameters
    ----------
    path : str | Path
        Directory path.

    Returns
    -------
    Path
        The Path object of the created/existing directory.
    """
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def to_plain(obj: Any) -> Any:
    """Recursively convert dataclasses, numpy and mpmath values to JSON-ready Python objects."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.generic):
        return to_plain(obj.item())
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, mpmath.mpf):
        return float(obj)
    if isinstance(obj, (complex, mpmath.mpc)):
        z = complex(obj)
        return {"re": z.real, "im": z.imag}
    return obj


def emit_csv(rows: Iterable[Dict[str, Any]], schema: Sequence[str], path: str | Path | None) -> Path | None:
    """
    Write ``rows`` as CSV with columns ``schema``.

    Parameters
    ----------
    rows : iterable of dict
        One mapping per row; keys outside ``schema`` are ignored.
    schema : sequence of str
        Column order; the header is written even for zero rows.
    path : str | Path | None
        Destination file, or None for stdout.

    Returns
    -------
    Path | None
        Written path (None when written to stdout).

    Raises
    ------
    OSError
        If the destination cannot be written.
    """
    frame = pd.DataFrame([{k: to_plain(r.get(k)) for k in schema} for r in rows], columns=list(schema))
    if path is None:
        frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
        return None
    p = Path(path)
    ensure_dir(p.parent)
    frame.to_csv(p, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"[IO] CSV saved → {p} ({len(frame)} rows)")
    return p


def emit_json(data: Any, path: str | Path | None = None) -> Path | None:
    """
    Save ``data`` as JSON (stdout when ``path`` is None).

    Floats keep Python's shortest round-trip repr. NaN and Inf are rejected.
    """
    try:
        text = json.dumps(to_plain(data), indent=2, ensure_ascii=False, allow_nan=False)
    except ValueError as e:
        logger.error(f"[IO] Refusing to write non-finite JSON: {e}")
        raise OutputValidationError(f"non-finite value in JSON output: {e}") from e
    if path is None:
        sys.stdout.write(text + "\n")
        return None
    p = Path(path)
    ensure_dir(p.parent)
    p.write_text(text + "\n", encoding="utf-8")
    logger.info(f"[IO] JSON saved → {p}")
    return p


def read_csv_rows(path: str | Path) -> list[Dict[str, Any]]:
    """Rows of a CSV written by ``emit_csv``, floats parsed bit-exactly."""
    frame = pd.read_csv(Path(path), float_precision="round_trip")
    return [
        {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}
        for row in frame.to_dict(orient="records")
    ]


def load_yaml(path: str | Path) -> Dict[str, Any]:
    """
    Load a dict from a YAML file.

    Parameters
    ----------
    path : str | Path

    Returns
    -------
    dict
    """
    p = Path(path)
    with p.open("r", encoding="utf-8") as f:
        obj = yaml.safe_load(f) or {}
    logger.debug(f"[IO] YAML loaded ← {p}")
    return obj
