import math

import numpy as np
import pytest
from scipy import special

import k3_regulator_lab.core.regulator.asymptotics as asymptotics_module
import k3_regulator_lab.core.regulator.psi as psi_module
from k3_regulator_lab.core.exceptions import DomainError, OracleUndefinedError, SingularPointError
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.numerics.types import QuadratureResult
from k3_regulator_lab.core.regulator.appendix import (
    appendix_bound_check,
    estat2_divergence,
    fit_log_divergence,
)
from k3_regulator_lab.core.regulator.asymptotics import approach_samples, asymptotic_fit, decay_profile
from k3_regulator_lab.core.regulator.density import (
    density_at_one,
    density_at_two,
    density_diagonal,
    density_general,
    pullback_oracle,
)
from k3_regulator_lab.core.regulator.periods import lattice_area, legendre_periods, period_ratio
from k3_regulator_lab.core.regulator.psi import PsiResult, error_inflation, limit_check, psi
from k3_regulator_lab.core.suites.kummer_suites import random_gamma, random_moduli

GAMMAS = np.array([0.3 + 0.2j, -1.1 + 0.7j, 2.0 - 1.5j, 0.05 + 0.9j])


def test_general_density_reduces_to_diagonal():
    for alpha in (0.3, 0.6, -0.4):
        general = density_general(GAMMAS, KummerModuli.diagonal(alpha))
        assert general == pytest.approx(density_diagonal(GAMMAS, alpha), rel=1e-12)


def test_diagonal_density_at_one_and_two_matches_substitutions():
    assert density_diagonal(GAMMAS, 1.0) == pytest.approx(density_at_one(GAMMAS), rel=1e-12)
    assert density_diagonal(GAMMAS, 2.0) == pytest.approx(density_at_two(GAMMAS), rel=1e-12)


def test_scalar_density_at_pole_raises():
    with pytest.raises(SingularPointError):
        density_at_one(1.0)


def test_density_modulus_matches_pullback_oracle():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(40):
        m = random_moduli(rng, -2.5, 2.5)
        gamma = random_gamma(rng, 3.0)
        try:
            oracle = pullback_oracle(gamma, m)
        except OracleUndefinedError:
            continue
        assert abs(density_general(gamma, m)) == pytest.approx(abs(oracle), rel=1e-7)
        checked += 1
    assert checked > 30


def test_lattice_area_matches_complete_elliptic_integrals():
    alpha = 0.3
    expected = 32.0 * special.ellipk(alpha) * special.ellipk(1.0 - alpha)
    assert lattice_area(alpha) == pytest.approx(expected, rel=1e-13)


def test_legendre_periods_and_ratio():
    omega1, omega2 = legendre_periods(0.5)
    assert omega1 > 0
    assert omega2.real == 0 and omega2.imag > 0
    # alpha = 1/2 is the square lattice
    assert period_ratio(0.5) == pytest.approx(1j, rel=1e-13)
    assert period_ratio(0.01).imag >= 1.0


@pytest.mark.parametrize("alpha", [0.0, 1.0, -1.0, 2.0])
def test_psi_rejects_excluded_alpha(alpha):
    with pytest.raises(DomainError):
        psi(alpha)


def test_asymptotic_fit_recovers_log_law():
    alphas = approach_samples(2.0, (2, 3, 4))
    values = [3.0 * math.log(abs(a - 2.0)) - 0.5 for a in alphas]
    fit = asymptotic_fit(alphas, values, 2.0)
    assert fit.stable
    assert fit.slope == pytest.approx(3.0, rel=1e-10)
    assert fit.intercept == pytest.approx(-0.5, abs=1e-9)
    assert fit.pair_slopes == pytest.approx([3.0, 3.0], rel=1e-9)


def test_asymptotic_fit_flags_unstable_samples():
    fit = asymptotic_fit([2.01, 2.001, 2.0001], [1.0, -5.0, 1.0], 2.0)
    assert not fit.stable


def test_asymptotic_fit_rejects_sample_at_center():
    with pytest.raises(DomainError):
        asymptotic_fit([1.0, 1.1, 1.2], [0.0, 0.1, 0.2], 1.0)


# normalized psi near 0 as computed at tol 1e-8: a peak near 0.05, then slow decay
NORMALIZED_NEAR_ZERO = {0.1: 0.2488, 0.05: 0.2613, 0.02: 0.2516, 0.01: 0.237, 0.003: 0.21, 0.001: 0.188}


def _tabulated_psi(table):
    def fake(alpha, tol=1e-6):
        return PsiResult(alpha=alpha, psi=0.0, eta=0.0, psi_normalized=table[alpha], err_abs=0.0, evals=0)

    return fake


def test_decay_profile_gates_on_the_tail_and_reports_the_peak(monkeypatch):
    monkeypatch.setattr(asymptotics_module, "psi", _tabulated_psi(NORMALIZED_NEAR_ZERO))
    profile = decay_profile((0.01, 0.003, 0.001), (0.1, 0.05, 0.02))
    assert profile.passed
    assert profile.tail.decreasing
    assert not profile.reference.decreasing
    assert profile.reference.values == [0.2488, 0.2613, 0.2516]
    assert profile.reciprocal_fit.slope < 0.0


def test_decay_profile_fails_when_the_tail_grows(monkeypatch):
    growing = {0.01: 0.1, 0.003: 0.2, 0.001: 0.3, 0.1: 0.3, 0.05: 0.2, 0.02: 0.1}
    monkeypatch.setattr(asymptotics_module, "psi", _tabulated_psi(growing))
    profile = decay_profile((0.01, 0.003, 0.001), (0.1, 0.05, 0.02))
    assert not profile.passed
    assert profile.reference.decreasing


def test_error_inflation_near_excluded_points():
    assert error_inflation(0.3) == 1.0
    assert error_inflation(2.0005) == pytest.approx(2.0)
    assert error_inflation(-1.0 + 1e-4) == pytest.approx(10.0)
    assert error_inflation(0.001) == 1.0


def test_psi_flags_and_inflates_near_excluded_alpha(monkeypatch):
    monkeypatch.setattr(
        psi_module, "_pair", lambda density, tol, half=None: QuadratureResult(1.0 + 0j, 1e-8, 10, True)
    )
    near = psi(2.0005, 1e-6)
    assert near.near_excluded
    assert near.err_abs == pytest.approx(2e-8)
    assert near.as_row()["err_abs"] == near.err_abs
    far = psi(0.3, 1e-6)
    assert not far.near_excluded
    assert far.err_abs == 1e-8


def test_log_divergence_fit_on_known_integral():
    # a synthetic 2 pi log(1/chi) - 2 pi log 2 divergence
    def evaluator(chi, tol):
        return 2.0 * math.pi * math.log(1.0 / chi) - 2.0 * math.pi * math.log(2.0)

    fit = estat2_divergence((1e-2, 1e-3, 1e-4), evaluator=evaluator)
    assert fit.stable
    assert fit.slope == pytest.approx(2.0 * math.pi, rel=1e-12)
    assert fit.intercept == pytest.approx(-2.0 * math.pi * math.log(2.0), rel=1e-10)


def test_log_divergence_fit_needs_two_samples():
    with pytest.raises(DomainError):
        fit_log_divergence([1e-2], [1.0])


@pytest.mark.slow
def test_psi_is_real_and_general_density_agrees():
    diagonal = psi(0.3, 1e-5)
    general = psi(0.3, 1e-5, use_general=True)
    assert diagonal.converged and general.converged
    assert abs(diagonal.eta) <= 1e-5 + 1e-3 * abs(diagonal.psi)
    assert general.psi == pytest.approx(diagonal.psi, rel=1e-4)
    assert diagonal.psi_normalized == pytest.approx(diagonal.psi / lattice_area(0.3))


@pytest.mark.slow
def test_limit_at_one():
    report = limit_check(1e-5, (0.9, 0.95, 0.99))
    assert report.i_one > 0
    assert report.half_plane_rel_err < 1e-6
    assert report.target == pytest.approx(-16.0 * report.i_one)
    assert report.passed


@pytest.mark.slow
def test_appendix_bound_holds():
    report = appendix_bound_check(0.1, 0.02, 1e-6)
    assert report.converged
    assert report.pieces_within_bounds
    assert 0 < report.total < report.bound
