import cmath

import numpy as np
import pytest

from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.kummer.census import branch_points, singular_fibers
from k3_regulator_lab.core.kummer.fiber import (
    biquadratic_residual,
    conic_membership_residual,
    conic_param,
    fiber_point,
    gamma_squared_from_xi,
    kummer_residual,
    residual_xi,
    special_point_table,
    zeta_coord,
    zeta_inverse,
)
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.numerics.types import INFINITY, is_infinite
from k3_regulator_lab.core.suites.kummer_suites import random_gamma, random_moduli


@pytest.mark.parametrize("alpha, beta", [(0.0, 0.5), (0.5, 1.0), (1.0, 1.0)])
def test_moduli_reject_degenerate_parameters(alpha, beta):
    with pytest.raises(DomainError):
        KummerModuli(alpha, beta)


def test_diagonal_moduli_have_delta_minus_one():
    m = KummerModuli.diagonal(0.3)
    assert m.is_diagonal
    assert m.delta == pytest.approx(-1.0)


def test_cycle_validity_excludes_alpha_beta_one():
    assert not KummerModuli(2.0, 0.5).cycle_valid
    assert KummerModuli(0.3, 0.6).cycle_valid
    with pytest.raises(DomainError):
        KummerModuli(2.0, 0.5).require_cycle_valid()


def test_fiber_points_satisfy_all_identities():
    rng = np.random.default_rng(42)
    for _ in range(200):
        m = random_moduli(rng, -2.5, 2.5)
        gamma = random_gamma(rng, 3.0)
        p = fiber_point(gamma, m)
        if p.at_infinity or is_infinite(p.xi):
            continue
        x, y, z = (complex(c) for c in p.xyz)
        assert kummer_residual(x, y, z, m) < 1e-10
        assert biquadratic_residual(complex(p.xi), z, m) < 1e-10
        assert conic_membership_residual(x, y, m) < 1e-10


def test_residual_xi_and_its_inverse_agree():
    m = KummerModuli(0.3, 0.6)
    gamma = 0.7 + 0.4j
    xi = residual_xi(gamma, m)
    assert gamma_squared_from_xi(xi, m) == pytest.approx(gamma * gamma, rel=1e-13)


def test_fiber_point_at_infinity_and_at_alpha():
    m = KummerModuli(0.3, 0.6)
    at_inf = fiber_point(INFINITY, m)
    assert at_inf.xi == pytest.approx(-0.6)
    assert at_inf.z == 0
    root = cmath.sqrt(0.3)
    at_alpha = fiber_point(root, m)
    assert is_infinite(at_alpha.xi)
    assert (at_alpha.x, at_alpha.y) == (1.0, 0.0)


def test_conic_parameter_at_infinity():
    m = KummerModuli(0.3, 0.6)
    assert conic_param(INFINITY, m) == (1.0, 0.0)


def test_zeta_coordinate_round_trip():
    m = KummerModuli(0.3, 0.6)
    gamma = 1.1 - 0.3j
    assert zeta_inverse(zeta_coord(gamma, m), m) == pytest.approx(gamma, rel=1e-12)
    assert zeta_coord(INFINITY, m) == 1.0
    assert is_infinite(zeta_coord(m.sqrt_delta, m))


def test_special_point_table_at_reference_moduli():
    rows = special_point_table(KummerModuli(0.3, 0.6))
    assert len(rows) == 8
    assert [r.label for r in rows][:3] == ["0", "inf", "delta"]
    assert max(r.error for r in rows) < 1e-12


def test_special_point_table_marks_conic_poles():
    rows = special_point_table(KummerModuli(0.3, 0.6))
    poles = rows[-1]
    assert poles.label == "Delta roots"
    assert is_infinite(poles.xy[0]) and is_infinite(poles.xy[1])


def test_census_at_half_half():
    census = singular_fibers(KummerModuli(0.5, 0.5))
    assert census.type_at(1.0) == "I2"
    assert census.type_at(2.0) == "I4"
    assert census.type_at(4.0) == "I4"
    assert census.type_at(5.0) == "I2"
    assert census.type_at(INFINITY) == "I6*"
    assert sorted(v.real for v in census.finite_values()) == pytest.approx([1.0, 2.0, 2.0, 4.0, 4.0, 5.0])


def test_generic_census_has_six_i2_fibers():
    census = singular_fibers(KummerModuli(0.3, 0.6))
    assert census.types() == {"I2": 6, "I6*": 1}


def test_branch_points_lie_on_the_conic():
    m = KummerModuli(0.3, 0.6)
    for x, y in branch_points(1.0, m):
        assert conic_membership_residual(x, y, m) < 1e-12
