"""
periods.py
=========================
Period lattice of the Legendre curve y^2 = x(x - 1)(x - alpha) for real alpha.

All three branch points {0, 1, alpha} are real, so the two half-period
integrals come straight from the AGM. The lattice area normalizes psi.
"""

from __future__ import annotations

import math

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.elliptic import cubic_half_periods

_TOL = 1e-12


def _real_alpha(alpha: complex | float) -> float:
    value = complex(alpha)
    if abs(value.imag) > _TOL * max(1.0, abs(value)) or not math.isfinite(value.real):
        logger.error(f"[Periods] Non-real alpha={alpha}")
        raise DomainError(f"period lattice is only implemented for real alpha, got {alpha}")
    a = value.real
    if abs(a) <= _TOL or abs(a - 1.0) <= _TOL:
        raise DomainError(f"alpha must avoid 0 and 1, got {alpha}")
    return a


def legendre_periods(alpha: float) -> tuple[float, complex]:
    """
    A basis (omega1, omega2) of the period lattice of dx/y.

    omega1 = 2 int_{e3}^{e2} dx/|y| is real and omega2 = 2i int_{e2}^{e1} dx/|y|
    is purely imaginary, where e1 > e2 > e3 are 0, 1, alpha sorted.

    Raises
    ------
    DomainError
        For non-real alpha or alpha in {0, 1}.
    """
    e1, e2, e3 = sorted((0.0, 1.0, _real_alpha(alpha)), reverse=True)
    a1, a2 = cubic_half_periods(e1, e2, e3)
    return 2.0 * a1, 2.0j * a2


def period_ratio(alpha: float) -> complex:
    """tau = omega2 / omega1, inverted if needed so that Im(tau) >= 1."""
    omega1, omega2 = legendre_periods(alpha)
    tau = omega2 / omega1
    return tau if tau.imag >= 1.0 else -1.0 / tau


def lattice_area(alpha: float) -> float:
    """|int_E dx/y ^ conj(dx/y)| = 2 |Im(conj(omega1) omega2)|."""
    omega1, omega2 = legendre_periods(alpha)
    area = 2.0 * abs((omega1.conjugate() * omega2).imag)
    logger.debug(f"[Periods] alpha={alpha}: omega=({omega1}, {omega2}), area={area}")
    return area
