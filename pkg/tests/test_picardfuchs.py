from fractions import Fraction

import numpy as np
import pytest

from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.odes import ode_residual
from k3_regulator_lab.core.picardfuchs.checks import (
    decoupled_residual_table,
    tensor_product_check,
    two_isogeny_check,
)
from k3_regulator_lab.core.picardfuchs.normal_form import (
    D_SCALE,
    MPolarizedPoint,
    invariants,
    isogeny_pair_from_t,
    j_pair_from_point,
    modular_parametrization,
    point_from_j_pair,
    qm_evaluate,
    qm_gradient,
)
from k3_regulator_lab.core.picardfuchs.operators import PFSuite
from k3_regulator_lab.core.picardfuchs.periods import (
    WeierstrassSlice,
    normalized_period,
    real_period,
    real_period_quadrature,
)


def test_invariants_are_scaling_invariant_and_exact():
    p = modular_parametrization(3)
    assert invariants(p.scaled(2)) == invariants(p)
    assert all(isinstance(v, Fraction) for v in invariants(p))


def test_invariants_need_nonzero_d():
    with pytest.raises(DomainError):
        invariants(MPolarizedPoint(1, 2, 0))


def test_modular_parametrization_is_degenerate_at_zero():
    with pytest.raises(DomainError):
        modular_parametrization(0)


def test_j_pair_round_trip():
    pair = j_pair_from_point(point_from_j_pair(3, 7))
    assert pair.j1 == pytest.approx(7.0)
    assert pair.j2 == pytest.approx(3.0)
    assert not pair.double_root


def test_j_pair_matches_isogeny_pair():
    t = Fraction(5)
    j_tau, j_two_tau = isogeny_pair_from_t(t)
    pair = j_pair_from_point(modular_parametrization(t))
    assert pair.j1 * pair.j2 == pytest.approx(float(j_tau * j_two_tau) / 1728**2, rel=1e-12)
    assert D_SCALE == 1728**2


def test_qm_gradient_matches_finite_differences():
    a, b, d = 1.3, -0.4, 2.1
    point = np.array([0.3, -0.7, 1.1, 0.9])
    grad = qm_gradient(a, b, d, *point)
    h = 1e-6
    for k in range(4):
        step = np.zeros(4)
        step[k] = h
        numeric = (qm_evaluate(a, b, d, *(point + step)) - qm_evaluate(a, b, d, *(point - step))) / (2 * h)
        assert grad[k] == pytest.approx(numeric, rel=1e-6, abs=1e-8)


def test_weierstrass_slice_has_requested_j():
    assert WeierstrassSlice(5.0).j_invariant == pytest.approx(5.0, rel=1e-13)
    with pytest.raises(DomainError):
        WeierstrassSlice(0.5)


@pytest.mark.parametrize("j", [2.0, 5.0, 10.0])
def test_real_period_agm_matches_quadrature(j):
    assert real_period(j) == pytest.approx(real_period_quadrature(j), rel=1e-10)


def test_operator_suite_names_and_coefficients():
    suite = PFSuite.build()
    assert suite.names == ["decoupled", "cubic_Yt", "quartic_sigma1", "factor1", "factor2"]
    table = suite.coefficient_table("factor1", [0.5, 2.0])
    assert list(table.columns) == ["s", "c0", "c1", "c2"]
    assert table["c2"].tolist() == [1.0, 1.0]
    with pytest.raises(DomainError):
        suite.get("sextic")


def test_decoupled_operator_annihilates_normalized_period():
    table = decoupled_residual_table((2.0, 5.0, 10.0), (2, 3, 4))
    assert list(table.columns) == ["j", "levels_2", "levels_3", "levels_4"]
    assert (table.drop(columns="j").min(axis=1) < 1e-5).all()


def test_decoupled_operator_rejects_non_period():
    ode = PFSuite.build().decoupled
    not_a_period = np.vectorize(lambda j: j * normalized_period(j), otypes=[float])
    assert ode_residual(ode, not_a_period, 5.0) > 1e-3


def test_tensor_product_of_factor_solutions_solves_quartic():
    assert tensor_product_check((0.1, 0.5)).passed
    assert tensor_product_check((0.1, 0.5), partner="exp").max_residual > 1e-3


def test_tensor_check_rejects_singular_interval():
    with pytest.raises(DomainError):
        tensor_product_check((-0.5, 0.5))


def test_two_isogeny_single_scaling():
    reports = [two_isogeny_check(y) for y in (1.1, 1.5, 2.0)]
    assert all(r.passing_scalings == [1728.0] for r in reports)
    for r in reports:
        match = next(m for m in r.matches if m.passed)
        assert match.t == pytest.approx(r.hauptmodul, rel=1e-6)


def test_two_isogeny_perturbed_control_fails():
    # y = 1.5 keeps tau away from the critical point tau = i of j
    assert two_isogeny_check(1.5, j2_perturbation=0.01).passing_scalings == []


def test_two_isogeny_rejects_y_outside_window():
    with pytest.raises(DomainError):
        two_isogeny_check(3.0)
