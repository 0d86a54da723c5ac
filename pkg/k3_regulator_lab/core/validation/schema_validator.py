"""
schema_validator.py
=========================
Pydantic models for run parameters and emitted rows.

Every number the CLI writes passes through one of the row models, so NaN
and Inf never reach a CSV or JSON file: they fail validation and the run
reports a check failure instead.
"""

from __future__ import annotations

from typing import Any, Literal, Optional, Sequence, Type

from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, ValidationError, field_validator

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.exceptions import OutputValidationError


class RunConfig(BaseModel):
    """
    Parameters of one CLI run, validated from flags.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    rel_tol: float = Field(settings.default_rel_tol, gt=0.0, lt=1.0)
    precision: Literal["double", "extended"] = settings.precision  # type: ignore[assignment]
    dps: int = Field(settings.extended_dps, ge=16, le=2000)
    output_format: Literal["text", "csv", "json"] = settings.output_format  # type: ignore[assignment]
    output_path: Optional[str] = None
    seed: int = Field(settings.random_seed, ge=0)

    @field_validator("output_path")
    @classmethod
    def output_path_not_blank(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and not v.strip():
            raise ValueError("output path must not be blank")
        return v


class PsiRow(BaseModel):
    """One row of ``psi``, ``eta`` and ``psi-scan`` output."""

    alpha: FiniteFloat
    psi: FiniteFloat
    eta: FiniteFloat
    psi_normalized: Optional[FiniteFloat] = None
    err_abs: FiniteFloat = Field(..., ge=0.0)
    evals: int = Field(..., ge=0)


PSI_SCHEMA = list(PsiRow.model_fields)


class SpecialPointRowModel(BaseModel):
    label: str
    gamma_squared: str
    xi: str
    x: str
    y: str
    error: FiniteFloat = Field(..., ge=0.0)


class KappaRow(BaseModel):
    kappa: FiniteFloat = Field(..., gt=0.0)
    numerator: FiniteFloat
    denominator: FiniteFloat
    err_kappa: FiniteFloat = Field(..., ge=0.0)
    transcendental_period: FiniteFloat
    precision: Literal["double", "extended"]
    dps: Optional[int] = None


class SuiteRow(BaseModel):
    suite: str
    criterion: int
    passed: bool
    elapsed_s: FiniteFloat = Field(..., ge=0.0)
    detail: str = ""


def validate_rows(rows: Sequence[dict[str, Any]], model: Type[BaseModel]) -> list[dict[str, Any]]:
    """
    Validate ``rows`` against ``model`` and return them as plain dicts.

    Raises
    ------
    OutputValidationError
        If any row fails validation (non-finite float, negative error, ...).
    """
    validated = []
    for i, record in enumerate(rows):
        try:
            validated.append(model(**record).model_dump())
        except ValidationError as e:
            logger.error(f"[Schema] Row {i} rejected by {model.__name__}: {e.errors()}")
            raise OutputValidationError(f"invalid {model.__name__} row {i}: {e}") from e
    return validated
