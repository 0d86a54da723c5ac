import math

import mpmath
import pytest

from k3_regulator_lab.core.numerics.types import PrecisionMode
from k3_regulator_lab.core.shioda.kappa import (
    kappa,
    kappa_cf_report,
    kappa_dual_strategy_check,
    kappa_truncated,
)

pytestmark = pytest.mark.slow


def test_kappa_double_nested_matches_closed_form_inner():
    nested = kappa(1e-9)
    closed = kappa(1e-9, inner="closed_form")
    assert nested.converged and closed.converged
    assert nested.kappa > 0
    assert nested.kappa == pytest.approx(closed.kappa, rel=1e-8)
    assert nested.transcendental_period == pytest.approx(2.0 * math.sqrt(2.0) * nested.denominator)


def test_kappa_extended_agrees_with_double():
    double = kappa(1e-10, inner="closed_form")
    extended = kappa(1e-12, PrecisionMode.EXTENDED, dps=32)
    assert extended.precision is PrecisionMode.EXTENDED
    assert isinstance(extended.kappa, mpmath.mpf)
    assert float(extended.kappa) == pytest.approx(double.kappa, rel=1e-9)


def test_truncation_strategy_agrees_with_substitution():
    report = kappa_dual_strategy_check(1e-10, inner="closed_form")
    assert report.truncation.strategy == "truncation"
    assert math.isnan(report.truncation.err_kappa)
    assert report.passed, f"relative difference {report.rel_diff:.2e}"


def test_truncation_needs_five_points():
    with pytest.raises(ValueError):
        kappa_truncated(grid=(200.0, 400.0))


def test_cf_terms_stable_across_precisions():
    first = kappa(1e-10, PrecisionMode.EXTENDED, dps=32)
    second = kappa(1e-10, PrecisionMode.EXTENDED, dps=64)
    report = kappa_cf_report([first, second], terms=40)
    assert report.stable_count >= 10
    assert report.expansions[0].terms[: report.stable_count] == report.stable_terms
