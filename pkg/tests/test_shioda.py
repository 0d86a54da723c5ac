import math

import mpmath
import numpy as np
import pytest

from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.types import PrecisionMode
from k3_regulator_lab.core.shioda.kappa import (
    CF_DISCLAIMER,
    KappaResult,
    ThetaGeometry,
    inner_closed_form,
    inner_denominator,
    inner_numerator,
    kappa_at_two_precisions,
    kappa_cf_report,
    tail_decay_profile,
    transcendental_period,
)
from k3_regulator_lab.core.shioda.theta_slice import (
    ThetaSlice,
    j_consistency,
    j_legendre,
    q_roots,
    shioda_parameters,
    theta_to_mu,
)


def test_q_roots_at_two():
    roots = q_roots(2.0)
    assert roots.r_minus == pytest.approx(-26.0 - math.sqrt(675.0), rel=1e-14)
    assert roots.r_plus == pytest.approx(-26.0 + math.sqrt(675.0), rel=1e-12)
    assert not roots.complex_roots


def test_q_roots_multiply_to_one():
    rng = np.random.default_rng(42)
    for theta in 1.0 + rng.exponential(5.0, size=100):
        roots = q_roots(float(theta))
        assert roots.r_minus * roots.r_plus == pytest.approx(1.0, rel=1e-14)
        assert roots.r_minus <= roots.r_plus < 0


def test_q_roots_are_complex_inside_the_slice():
    assert q_roots(0.2).complex_roots


def test_singular_thetas_of_the_rank20_slice():
    found = ThetaSlice().singular_thetas()
    assert [t for t, _ in found] == pytest.approx([-1.0, -0.5, 0.5, 1.0], abs=1e-7)
    assert [mult for _, mult in found] == [1, 2, 2, 1]


def test_theta_to_mu_maps_singular_fibers():
    assert [theta_to_mu(t) for t in (1.0, -1.0, 0.5, -0.5)] == [1.0, 5.0, 2.0, 4.0]


def test_j_legendre_symmetries():
    lam = 0.37 + 0.2j
    j = j_legendre(lam)
    for image in (1.0 - lam, 1.0 / lam, lam / (lam - 1.0)):
        assert j_legendre(image) == pytest.approx(j, rel=1e-12)
    assert j_legendre(0.5) == pytest.approx(1728.0)
    with pytest.raises(DomainError):
        j_legendre(1.0)


def test_j_consistency_at_the_rank20_point():
    assert max(j_consistency(0.5, 0.5, 1.0, 0.0)) < 1e-12
    a, b = shioda_parameters(0.5, 0.5)
    assert a == pytest.approx(1.0)
    assert b == pytest.approx(0.0, abs=1e-7)


def test_geometry_from_theta_and_s_agree():
    by_theta = ThetaGeometry.at_theta(4.0)
    by_s = ThetaGeometry.at_s(0.25)
    assert by_s.excess == pytest.approx(by_theta.excess, rel=1e-13)
    assert by_theta.r_minus * by_theta.r_plus == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        ThetaGeometry.at_theta(0.5)


@pytest.mark.parametrize("theta", [1.5, 3.0, 40.0])
def test_inner_integrals_match_closed_forms(theta):
    numerator, denominator = inner_closed_form(theta)
    assert inner_numerator(theta).value == pytest.approx(numerator, rel=1e-10)
    assert inner_denominator(theta).value == pytest.approx(denominator, rel=1e-10)


def test_inner_integrals_near_theta_one():
    numerator, denominator = inner_closed_form(eps=1e-9)
    assert inner_numerator(eps=1e-9).value == pytest.approx(numerator, rel=1e-9)
    assert inner_denominator(eps=1e-9).value == pytest.approx(denominator, rel=1e-10)
    assert denominator == pytest.approx(math.pi, rel=1e-3)


def test_folded_denominator_matches_full_range():
    full = inner_denominator(2.5).value
    assert inner_denominator(2.5, fold=True).value == pytest.approx(full, rel=1e-11)


def test_inner_limits_at_theta_one():
    assert inner_denominator(1.0).value == math.pi
    with pytest.raises(DomainError):
        inner_numerator(1.0)
    assert inner_closed_form(1.0)[0] == math.inf


def test_tail_decay_profile():
    profile = tail_decay_profile()
    assert profile.consistent
    assert profile.numerator_slopes == pytest.approx([-1.5, -1.5, -1.5], abs=0.05)


def _extended_result(dps):
    with mpmath.workdps(dps):
        value = +mpmath.pi
    return KappaResult(
        numerator=value,
        denominator=mpmath.mpf(1),
        kappa=value,
        err_numerator=0.0,
        err_denominator=0.0,
        err_kappa=0.0,
        precision=PrecisionMode.EXTENDED,
        dps=dps,
    )


def test_cf_report_keeps_only_agreeing_terms():
    report = kappa_cf_report([_extended_result(32), _extended_result(64)], terms=40)
    assert report.stable_terms[:5] == (3, 7, 15, 1, 292)
    assert 20 <= report.stable_count < 40
    assert report.disclaimer == CF_DISCLAIMER


def test_cf_report_needs_two_precisions():
    with pytest.raises(DomainError):
        kappa_cf_report([_extended_result(32)])


def test_kappa_at_two_precisions_doubles_digits():
    calls = []

    def fake(rel_tol, precision, dps=None):
        calls.append((precision, dps))
        return _extended_result(dps or 32)

    kappa_at_two_precisions(1e-10, "extended", 40, evaluator=fake)
    assert calls == [(PrecisionMode.EXTENDED, 40), (PrecisionMode.EXTENDED, 80)]
    calls.clear()
    kappa_at_two_precisions(1e-10, "double", 32, evaluator=fake)
    assert calls == [(PrecisionMode.DOUBLE, None), (PrecisionMode.EXTENDED, 32)]


def test_transcendental_period_scales_denominator():
    result = _extended_result(32)
    with mpmath.workdps(32):
        assert float(transcendental_period(result)) == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-15)
