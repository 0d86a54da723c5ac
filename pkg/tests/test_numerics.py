import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import special

from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.continued_fraction import common_prefix, continued_fraction, convergents
from k3_regulator_lab.core.numerics.cubature import Disk, Rectangle, integrate_2d, integrate_sphere
from k3_regulator_lab.core.numerics.differentiation import central_derivatives, complex_derivative
from k3_regulator_lab.core.numerics.elliptic import agm, cubic_half_periods, elliptic_K
from k3_regulator_lab.core.numerics.modular import j_function
from k3_regulator_lab.core.numerics.odes import RationalODE, ode_residual, solve_ivp
from k3_regulator_lab.core.numerics.quadrature import integrate_1d
from k3_regulator_lab.core.numerics.types import (
    INFINITY,
    QuadratureResult,
    SingularityKind,
    SingularityRegistry,
)


def test_agm_is_invariant_under_one_step():
    a, b = 1.0, 0.3
    assert agm(a, b) == pytest.approx(agm(0.5 * (a + b), math.sqrt(a * b)), rel=1e-15)
    assert agm(2.0, 2.0) == 2.0


def test_agm_rejects_nonpositive():
    with pytest.raises(DomainError):
        agm(-1.0, 1.0)


@pytest.mark.parametrize("k", [0.0, 0.1, 0.5, 0.9, 0.999])
def test_elliptic_k_matches_scipy(k):
    # scipy's ellipk takes the parameter m = k^2
    assert elliptic_K(k) == pytest.approx(special.ellipk(k * k), rel=1e-14)


def test_cubic_half_periods_are_equal_for_symmetric_roots():
    a1, a2 = cubic_half_periods(1.0, 0.0, -1.0)
    assert a1 == pytest.approx(a2, rel=1e-14)


def test_integrate_1d_inverse_sqrt_endpoint():
    registry = SingularityRegistry.of([0.0], SingularityKind.SQRT_ENDPOINT)
    result = integrate_1d(lambda x: 1.0 / np.sqrt(x), (0.0, 1.0), registry, 1e-12)
    assert result.converged
    assert result.value == pytest.approx(2.0, rel=1e-11)


def test_integrate_1d_log_singularity():
    registry = SingularityRegistry.of([0.0], SingularityKind.LOGARITHMIC)
    result = integrate_1d(np.log, (0.0, 1.0), registry, 1e-12)
    assert result.value == pytest.approx(-1.0, rel=1e-11)


def test_integrate_1d_with_complements_near_collision():
    # int_{-1}^{1} dx / sqrt(1 - x^2) = pi, written with the endpoint distances
    def f(x, from_lo, to_hi):
        return 1.0 / np.sqrt(from_lo * to_hi)

    result = integrate_1d(f, (-1.0, 1.0), None, 1e-12, with_complements=True)
    assert result.value == pytest.approx(math.pi, rel=1e-11)


def test_quadrature_result_combine_sums_errors():
    parts = [QuadratureResult(1.0, 1e-3, 10, True), QuadratureResult(2.0, 2e-3, 5, False)]
    total = QuadratureResult.combine(parts)
    assert total.value == 3.0
    assert total.err_abs == pytest.approx(3e-3)
    assert total.evals == 15
    assert not total.converged


def test_registry_merges_near_duplicates():
    registry = SingularityRegistry.of([1.0, 1.0 + 1e-15, 2.0], SingularityKind.INVERSE_MODULUS)
    registry = registry.add(INFINITY, SingularityKind.LOGARITHMIC).add(INFINITY, SingularityKind.LOGARITHMIC)
    assert len(registry.locations()) == 3
    assert registry.kinds_at(1.0) == {SingularityKind.INVERSE_MODULUS}


def test_integrate_2d_polynomial_on_rectangle():
    result = integrate_2d(lambda z: np.real(z) ** 2, Rectangle(0.0, 1.0, 0.0, 2.0), None, 1e-10)
    assert result.value == pytest.approx(2.0 / 3.0, rel=1e-9)


def test_integrate_2d_inverse_modulus_on_disk():
    # int_{|z| < 1} dx dy / |z| = 2 pi
    registry = SingularityRegistry.of([0j], SingularityKind.INVERSE_MODULUS)
    result = integrate_2d(lambda z: 1.0 / np.abs(z), Disk(0j, 1.0), registry, 1e-9)
    assert result.value == pytest.approx(2.0 * math.pi, rel=1e-7)


def test_central_derivatives_of_exp():
    out = central_derivatives(np.exp, 0.3, 0.05, 4)
    assert out == pytest.approx(np.full(5, math.exp(0.3)), rel=1e-5)


def test_complex_derivative_of_square():
    z0 = 0.4 + 1.2j
    assert complex_derivative(lambda z: z * z, z0) == pytest.approx(2.0 * z0, rel=1e-10)


def test_j_function_at_i():
    assert j_function(1j) == pytest.approx(1728.0, rel=1e-11)


def test_j_function_rejects_off_axis():
    with pytest.raises(DomainError):
        j_function(0.5 + 1j)


def test_continued_fraction_of_rational_terminates():
    cf = continued_fraction(Fraction(355, 113))
    assert cf.terms == (3, 7, 16)
    assert cf.terminated
    assert convergents(cf.terms)[-1] == Fraction(355, 113)


def test_continued_fraction_of_sqrt_two():
    cf = continued_fraction(math.sqrt(2.0), n_terms=30)
    assert cf.terms[0] == 1
    assert set(cf.terms[1:]) == {2}
    assert cf.trusted >= 10
    assert not cf.terminated


def test_convergents_of_golden_ratio():
    expected = [Fraction(1), Fraction(2), Fraction(3, 2), Fraction(5, 3), Fraction(8, 5)]
    assert convergents([1, 1, 1, 1, 1]) == expected


def test_common_prefix_stops_at_first_disagreement():
    a = continued_fraction(Fraction(355, 113))
    b = continued_fraction(Fraction(22, 7))
    assert common_prefix(a, b) == (3, 7)


def test_ode_residual_small_on_a_solution():
    ode = RationalODE.from_expressions("harmonic", ["1", "0", "1"])
    assert ode_residual(ode, np.sin, 0.7) < 1e-8
    assert ode_residual(ode, np.exp, 0.7) > 0.1


def test_solve_ivp_reproduces_cosine():
    ode = RationalODE.from_expressions("harmonic", ["1", "0", "1"])
    sol = solve_ivp(ode, 1.0, 0.0, (0.0, 2.0))
    assert sol(1.5) == pytest.approx(math.cos(1.5), abs=1e-10)
    assert sol.derivative(1.5) == pytest.approx(-math.sin(1.5), abs=1e-10)


def test_solve_ivp_rejects_singular_interval():
    ode = RationalODE.from_expressions("euler", ["1", "x", "x**2"])
    with pytest.raises(DomainError):
        solve_ivp(ode, 1.0, 0.0, (-1.0, 1.0))


def test_agm_matches_its_defining_integral():
    a, b = 1.0, 2.0
    integral, _ = sp_integrate.quad(
        lambda t: 1.0 / math.sqrt(a * a * math.cos(t) ** 2 + b * b * math.sin(t) ** 2),
        0.0,
        0.5 * math.pi,
        epsabs=0.0,
        epsrel=1e-14,
    )
    assert agm(a, b) == pytest.approx(0.5 * math.pi / integral, rel=1e-12)


def test_elliptic_k_grows_logarithmically_near_one():
    ks = [0.9, 0.99, 0.999]
    values = [elliptic_K(k) for k in ks]
    assert values == sorted(values)
    k = ks[-1]
    assert values[-1] / math.log(4.0 / math.sqrt(1.0 - k * k)) == pytest.approx(1.0, rel=0.02)


@pytest.mark.parametrize("k", [1.0, 1.5])
def test_elliptic_k_rejects_k_at_least_one(k):
    with pytest.raises(DomainError):
        elliptic_K(k)


def test_integrate_2d_log_over_modulus_on_disk():
    # 2 pi int_0^1 log r dr = -2 pi
    registry = SingularityRegistry.of([0j], SingularityKind.INVERSE_MODULUS)
    result = integrate_2d(lambda z: np.log(np.abs(z)) / np.abs(z), Disk(0j, 1.0), registry, 1e-9)
    assert result.value == pytest.approx(-2.0 * math.pi, rel=1e-6)


def test_integrate_2d_off_center_singularity_matches_polar_oracle():
    c = 0.3
    # polar coordinates about c: the integral is the length of the ray from c to the unit circle
    oracle, _ = sp_integrate.quad(
        lambda phi: -c * math.cos(phi) + math.sqrt(1.0 - (c * math.sin(phi)) ** 2),
        0.0,
        2.0 * math.pi,
        epsabs=0.0,
        epsrel=1e-13,
    )
    registry = SingularityRegistry.of([c + 0j], SingularityKind.INVERSE_MODULUS)
    result = integrate_2d(lambda z: 1.0 / np.abs(z - c), Disk(0j, 1.0), registry, 1e-10)
    assert result.value == pytest.approx(oracle, rel=1e-8)


def test_integrate_sphere_spherical_area():
    result = integrate_sphere(lambda g: 1.0 / (1.0 + np.abs(g) ** 2) ** 2, None, 1e-10)
    assert result.converged
    assert result.value == pytest.approx(math.pi, rel=1e-9)


def test_integrate_sphere_odd_density_vanishes_and_converges():
    result = integrate_sphere(lambda g: np.real(g) / (1.0 + np.abs(g) ** 2) ** 3, None, 1e-10)
    assert abs(result.value) < 1e-12
    assert result.converged
    # sum of |cell integrals| never exceeds int |Re g| / (1 + |g|^2)^3 = pi / 4
    assert 0.0 < result.abs_mass <= 0.25 * math.pi * (1.0 + 1e-6)


@pytest.mark.slow
def test_integrate_sphere_limit_density_is_positive():
    def density(g):
        g2 = g * g
        log_ratio = np.log(np.abs(g + 1j)) - np.log(np.abs(g - 1j))
        return log_ratio * np.imag(g) / (np.abs(g2 - 1.0) ** 2 * np.abs(g2 + 1.0))

    poles = SingularityRegistry.of([1.0, -1.0, 1j, -1j], SingularityKind.INVERSE_MODULUS)
    registry = poles.extend(SingularityRegistry.of([1j, -1j], SingularityKind.LOGARITHMIC))
    full = integrate_sphere(density, registry, 1e-7)
    upper = integrate_sphere(density, registry, 1e-7, half="upper")
    assert full.converged
    assert 0.0 < full.value < math.inf
    assert full.value == pytest.approx(2.0 * upper.value, rel=1e-6)


def test_j_function_at_2i_exceeds_1728():
    value = j_function(2j)
    assert value > 1728.0
    assert value == pytest.approx(287496.0, rel=1e-9)
    assert j_function(2j, tail_tol=1e-6) == pytest.approx(value, rel=1e-5)


def test_j_function_leading_term_dominates_high_on_the_axis():
    tau = 3j
    q = math.exp(-2.0 * math.pi * tau.imag)
    assert j_function(tau) * q == pytest.approx(1.0, rel=0.01)


@pytest.mark.parametrize("x, terms", [(0.5, (0, 2)), (7, (7,)), (Fraction(7, 1), (7,))])
def test_continued_fraction_of_simple_values(x, terms):
    cf = continued_fraction(x)
    assert cf.terms == terms
    assert cf.terminated


@pytest.mark.parametrize("x", [-0.5, 0.0, 0, Fraction(-3, 2)])
def test_continued_fraction_rejects_non_positive_input(x):
    with pytest.raises(DomainError):
        continued_fraction(x)


def test_solve_ivp_reproduces_exponential():
    ode = RationalODE.from_expressions("growth", ["-1", "0", "1"])
    sol = solve_ivp(ode, 1.0, 1.0, (0.0, 1.0))
    assert sol(1.0) == pytest.approx(math.e, abs=1e-9)


def test_quadrature_result_combine_sums_mass():
    parts = [
        QuadratureResult(1.0, 0.0, 1, True, abs_mass=2.0),
        QuadratureResult(-1.0, 0.0, 1, True, abs_mass=3.0),
    ]
    assert QuadratureResult.combine(parts).abs_mass == 5.0
