"""
normal_form.py
=========================
The M-polarized normal form Q_M, its moduli invariants and the modular
parametrization of the family by the level-2 Hauptmodul t.

Exact inputs (int, Fraction) stay exact: invariants and the parametrization
are computed with ``fractions.Fraction`` and only become floats on request.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Any

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.modular import nome, q_product

D_SCALE = 2**12 * 3**6


def _exact(value: Any) -> Any:
    if isinstance(value, bool):
        raise DomainError("expected a number, got a bool")
    if isinstance(value, int):
        return Fraction(value)
    return value


def _is_zero(value: Any) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(complex(value)) <= 1e-300


@dataclass(frozen=True)
class MPolarizedPoint:
    """
    Coefficients (a, b, d) of Q_M, defined up to (lambda^2 a, lambda^3 b, lambda^6 d).
    """

    a: Number
    b: Number
    d: Number

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _exact(self.a))
        object.__setattr__(self, "b", _exact(self.b))
        object.__setattr__(self, "d", _exact(self.d))

    def scaled(self, lam: Number) -> "MPolarizedPoint":
        lam = _exact(lam)
        return MPolarizedPoint(lam**2 * self.a, lam**3 * self.b, lam**6 * self.d)

    def normalize(self) -> "MPolarizedPoint":
        """Rescale to a = 1 (lambda = a^(-1/2), principal branch)."""
        if _is_zero(self.a):
            raise DomainError("normalize needs a != 0")
        lam = 1.0 / cmath.sqrt(complex(self.a))
        return MPolarizedPoint(1.0 + 0j, lam**3 * complex(self.b), complex(self.d) / complex(self.a) ** 3)


def qm_evaluate(a: Any, b: Any, d: Any, X: Any, Y: Any, Z: Any, W: Any) -> Any:
    """Q_M = Y^2 Z W - 4 X^3 Z + 3 a X Z W^2 + b Z W^3 - (d Z^2 W^2 + W^4) / 2."""
    return (
        Y * Y * Z * W
        - 4 * X**3 * Z
        + 3 * a * X * Z * W * W
        + b * Z * W**3
        - (d * Z * Z * W * W + W**4) / 2
    )


def qm_gradient(a: Any, b: Any, d: Any, X: Any, Y: Any, Z: Any, W: Any) -> tuple[Any, Any, Any, Any]:
    """Partial derivatives of Q_M in (X, Y, Z, W)."""
    d_x = -12 * X * X * Z + 3 * a * Z * W * W
    d_y = 2 * Y * Z * W
    d_z = Y * Y * W - 4 * X**3 + 3 * a * X * W * W + b * W**3 - d * Z * W * W
    d_w = Y * Y * Z + 6 * a * X * Z * W + 3 * b * Z * W * W - d * Z * Z * W - 2 * W**3
    return d_x, d_y, d_z, d_w


def invariants(p: MPolarizedPoint) -> tuple[Any, Any]:
    """
    Fundamental invariants (a^3 / d, b^2 / d), exact for rational points.

    Raises
    ------
    DomainError
        If d = 0.
    """
    if _is_zero(p.d):
        logger.error(f"[NormalForm] d = 0 at {p}")
        raise DomainError("invariants are undefined for d = 0")
    return p.a**3 / p.d, p.b**2 / p.d


def modular_parametrization(t: Any) -> MPolarizedPoint:
    """
    a = (t + 16)(t + 256), b = (t - 512)(t - 8)(t + 64), d = 2^12 3^6 t^3.

    Raises
    ------
    DomainError
        If t = 0 (then d = 0).
    """
    t = _exact(t)
    if _is_zero(t):
        raise DomainError("modular_parametrization is degenerate at t = 0")
    return MPolarizedPoint(
        a=(t + 16) * (t + 256),
        b=(t - 512) * (t - 8) * (t + 64),
        d=D_SCALE * t**3,
    )


@dataclass(frozen=True)
class JPair:
    j1: complex
    j2: complex
    double_root: bool

    def swapped(self) -> "JPair":
        return JPair(self.j2, self.j1, self.double_root)


def j_pair_from_invariants(pi: Any, sigma: Any) -> JPair:
    """Roots of X^2 - sigma X + pi, larger modulus first."""
    sigma_c, pi_c = complex(sigma), complex(pi)
    disc = cmath.sqrt(sigma_c * sigma_c - 4.0 * pi_c)
    big = 0.5 * (sigma_c + disc if (sigma_c.conjugate() * disc).real >= 0 else sigma_c - disc)
    small = pi_c / big if big != 0 else 0j
    double = abs(disc) <= 1e-12 * max(1.0, abs(sigma_c))
    if double:
        logger.debug(f"[NormalForm] Double root in j-pair: sigma={sigma}, pi={pi}")
    return JPair(big, small, double)


def symmetric_functions(p: MPolarizedPoint) -> tuple[Any, Any]:
    """(sigma, pi) = (1 + (a^3 - b^2)/d, a^3/d)."""
    a3_d, b2_d = invariants(p)
    return 1 + a3_d - b2_d, a3_d


def j_pair_from_point(p: MPolarizedPoint) -> JPair:
    """
    The pair (j1, j2) with j1 j2 = a^3/d and (j1 - 1)(j2 - 1) = b^2/d.
    """
    sigma, pi = symmetric_functions(p)
    return j_pair_from_invariants(pi, sigma)


def point_from_j_pair(j1: Any, j2: Any) -> MPolarizedPoint:
    """The a = 1 chart: b^2 = (j1 - 1)(j2 - 1)/(j1 j2), d = 1/(j1 j2)."""
    j1, j2 = _exact(j1), _exact(j2)
    prod = j1 * j2
    if _is_zero(prod):
        raise DomainError("point_from_j_pair needs j1 j2 != 0")
    b2 = (j1 - 1) * (j2 - 1) / prod
    b = cmath.sqrt(complex(b2)) if not isinstance(b2, Fraction) else _fraction_sqrt(b2)
    return MPolarizedPoint(1, b, 1 / prod)


def _fraction_sqrt(value: Fraction) -> Any:
    if value >= 0:
        num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if num * num == value.numerator and den * den == value.denominator:
            return Fraction(num, den)
        return math.sqrt(value)
    return cmath.sqrt(complex(value))


def isogeny_pair_from_t(t: Any) -> tuple[Any, Any]:
    """(j(tau), j(2 tau)) = ((t + 16)^3 / t, (t + 256)^3 / t^2) in terms of the Hauptmodul."""
    t = _exact(t)
    if _is_zero(t):
        raise DomainError("isogeny_pair_from_t is singular at t = 0")
    return (t + 16) ** 3 / t, (t + 256) ** 3 / t**2


def hauptmodul_t(tau: complex, tail_tol: float = 1e-14) -> float:
    """t(tau) = 2^12 (eta(2 tau) / eta(tau))^24 = 4096 q prod (1 + q^n)^24."""
    q = nome(tau)
    return 4096.0 * q * q_product(q, 1.0, 24, tail_tol).value
