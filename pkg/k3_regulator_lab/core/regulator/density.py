"""
density.py
=========================
The (1,1) current pulled back to the normalization P^1_gamma of the mu = 1 fiber.

Features
--------
- ``density_general``: coefficient F of F dgamma ^ dgamma-bar for any (alpha, beta)
- ``density_diagonal``: the simplified alpha = beta form
- ``pullback_oracle``: independent evaluation of dx/u ^ conj(dy/v) by the chain
  rule through the fiber parametrization
- measure conversions (dgamma ^ dgamma-bar = -2i dx dy) and the pole registries
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import OracleUndefinedError, SingularPointError
from k3_regulator_lab.core.kummer.fiber import fiber_point
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.numerics.differentiation import complex_derivative
from k3_regulator_lab.core.numerics.types import (
    INFINITY,
    SingularityKind,
    SingularityRegistry,
    SpherePoint,
    is_infinite,
)


def _finish(value: np.ndarray, den: np.ndarray, gamma: Any, where: str) -> Any:
    if np.ndim(gamma) == 0:
        if den == 0:
            logger.error(f"[Density] {where}: evaluation at a registered pole gamma={gamma}")
            raise SingularPointError(f"{where} is singular at gamma={gamma}")
        return complex(value)
    return value


def density_general(gamma: Any, m: KummerModuli) -> Any:
    """
    Coefficient F(gamma) of the pulled-back current F dgamma ^ dgamma-bar.

    Vectorized over ``gamma``. Array entries at a pole come out non-finite;
    a scalar pole raises ``SingularPointError``.
    """
    a, b = m.alpha, m.beta
    d = m.delta
    gamma = np.asarray(gamma, dtype=complex)
    g = gamma * gamma
    pref = -4.0 * abs(a * b - 1.0) / (abs(b) * abs(1.0 - a))
    n1 = (a * b * b - b * b - b) * g * g + 2.0 * b * g + (a * a * b * b - a * a * b + a - 2.0 * a * b)
    n2 = (a * a * b * b - a * b * b + b - 2.0 * a * b) * g * g + 2.0 * a * g + (a * a * b - a * a - a)
    den = (
        np.abs(g - a)
        * np.abs(1.0 - b * g)
        * np.abs(g - d)
        * np.abs(g - (1.0 + a - a * b))
        * np.abs((1.0 + b - a * b) * g - 1.0)
        * np.abs(b * g * g + (a * a * b * b - 3.0 * a * b) * g + a)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        value = pref * n1 * gamma * np.conj(n2) / den
    return _finish(value, den, gamma, "density_general")


def density_diagonal(gamma: Any, alpha: complex) -> Any:
    """Coefficient F(gamma) on the diagonal alpha = beta (delta = -1)."""
    a = complex(alpha)
    gamma = np.asarray(gamma, dtype=complex)
    g = gamma * gamma
    c_outer = a * a - a - 1.0
    c_inner = a**3 - a * a - 2.0 * a + 1.0
    n1 = c_outer * g * g + 2.0 * g + c_inner
    n2 = c_inner * g * g + 2.0 * g + c_outer
    e = 1.0 + a - a * a
    den = (
        np.abs(g - a)
        * np.abs(1.0 - a * g)
        * np.abs(g + 1.0)
        * np.abs(g - e)
        * np.abs(e * g - 1.0)
        * np.abs(g * g + (a**3 - 3.0 * a) * g + 1.0)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        value = -4.0 * abs(a + 1.0) * n1 * gamma * np.conj(n2) / den
    return _finish(value, den, gamma, "density_diagonal")


def density_at_one(gamma: Any) -> Any:
    """The alpha = 1 substitution after cancellation: -8 gamma / (|gamma^2 - 1|^2 |gamma^2 + 1|)."""
    gamma = np.asarray(gamma, dtype=complex)
    g = gamma * gamma
    den = np.abs(g - 1.0) ** 2 * np.abs(g + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = -8.0 * gamma / den
    return _finish(value, den, gamma, "density_at_one")


def density_at_two(gamma: Any) -> Any:
    """The alpha = 2 substitution after cancellation: -12 gamma / (|gamma^2-2||2gamma^2-1||gamma^2+1|)."""
    gamma = np.asarray(gamma, dtype=complex)
    g = gamma * gamma
    den = np.abs(g - 2.0) * np.abs(2.0 * g - 1.0) * np.abs(g + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = -12.0 * gamma / den
    return _finish(value, den, gamma, "density_at_two")


def real_part_density(F: Any) -> Any:
    """Re(-2i F): the dx dy density of Re(F dgamma ^ dgamma-bar)."""
    return 2.0 * np.imag(F)


def imag_part_density(F: Any) -> Any:
    """Im(-2i F): the dx dy density of Im(F dgamma ^ dgamma-bar)."""
    return -2.0 * np.real(F)


def _gamma_x(gamma: np.ndarray, m: KummerModuli) -> np.ndarray:
    a, b = m.alpha, m.beta
    g = gamma * gamma
    xi = (1.0 - b * g) / (g - a)
    return a * (xi * xi + (b - 1.0) * xi) / (a * xi * xi + a * b * xi + b)


def _gamma_y(gamma: np.ndarray, m: KummerModuli) -> np.ndarray:
    a, b = m.alpha, m.beta
    g = gamma * gamma
    xi = (1.0 - b * g) / (g - a)
    return b * ((a - 1.0) * xi + 1.0) / (a * xi * xi + a * b * xi + b)


def pullback_oracle(gamma: complex, m: KummerModuli) -> complex:
    """
    Coefficient of dx/u ^ conj(dy/v) with respect to dgamma ^ dgamma-bar.

    x(gamma), y(gamma) are differentiated numerically; u is the principal
    sqrt(x(x-1)(x-alpha)) and v = z x y / u, so that u v = z x y.

    Raises
    ------
    OracleUndefinedError
        At branch points of u or v and at points over infinity.
    """
    gamma = complex(gamma)
    point = fiber_point(gamma, m)
    if point.at_infinity or is_infinite(point.xi):
        raise OracleUndefinedError(f"pullback oracle undefined over infinity at gamma={gamma}")
    x, y, z = complex(point.x), complex(point.y), complex(point.z)
    u = cmath.sqrt(x * (x - 1.0) * (x - m.alpha))
    if u == 0 or z * x * y == 0:
        logger.error(f"[Oracle] Branch point at gamma={gamma}: u={u}, z x y={z * x * y}")
        raise OracleUndefinedError(f"pullback oracle undefined at branch point gamma={gamma}")
    v = z * x * y / u
    dx = complex_derivative(lambda t: _gamma_x(t, m), gamma)
    dy = complex_derivative(lambda t: _gamma_y(t, m), gamma)
    return (dx / u) * (dy / v).conjugate()


def _gamma_points(squares: list[complex | None]) -> list[SpherePoint]:
    points: list[SpherePoint] = []
    for g in squares:
        if g is None:
            points.append(INFINITY)
            continue
        root = cmath.sqrt(g)
        points.extend([root, -root])
    return points


def _quadratic_roots(c2: complex, c1: complex, c0: complex) -> list[complex | None]:
    if abs(c2) <= 1e-14 * max(abs(c1), abs(c0), 1.0):
        # degree drops: one root escapes to infinity
        return [None] if abs(c1) <= 1e-14 else [-c0 / c1, None]
    disc = cmath.sqrt(c1 * c1 - 4.0 * c2 * c0)
    q = -0.5 * (c1 + disc if (c1.conjugate() * disc).real >= 0 else c1 - disc)
    if q == 0:
        return [0j, 0j]
    return [q / c2, c0 / q]


def _linear_root(c1: complex, c0: complex) -> complex | None:
    return None if abs(c1) <= 1e-14 * max(1.0, abs(c0)) else -c0 / c1


def regulator_registry(m: KummerModuli) -> SingularityRegistry:
    """
    The fourteen poles of the current plus the logarithmic points +-sqrt(delta).

    Poles come from the denominator factors, solved as polynomials in gamma^2.
    """
    a, b = complex(m.alpha), complex(m.beta)
    squares: list[complex | None] = [
        a,
        _linear_root(-b, 1.0 + 0j),
        m.delta,
        1.0 + a - a * b,
        _linear_root(1.0 + b - a * b, -1.0 + 0j),
        *_quadratic_roots(b, a * a * b * b - 3.0 * a * b, a),
    ]
    poles = SingularityRegistry.of(_gamma_points(squares), SingularityKind.INVERSE_MODULUS)
    s = m.sqrt_delta
    logs = SingularityRegistry.of([s, -s], SingularityKind.LOGARITHMIC)
    return poles.extend(logs)


def diagonal_registry(alpha: complex) -> SingularityRegistry:
    return regulator_registry(KummerModuli.diagonal(alpha))


def limit_registry(alpha0: float) -> SingularityRegistry:
    """Registry of the reduced densities at alpha = 1 and alpha = 2."""
    squares: list[complex | None] = [-1.0 + 0j]
    if alpha0 == 1.0:
        squares.append(1.0 + 0j)
    else:
        squares.extend([2.0 + 0j, 0.5 + 0j])
    poles = SingularityRegistry.of(_gamma_points(squares), SingularityKind.INVERSE_MODULUS)
    return poles.extend(SingularityRegistry.of([1j, -1j], SingularityKind.LOGARITHMIC))


@dataclass(frozen=True)
class RegulatorDensity:
    """
    A current F dgamma ^ dgamma-bar together with its singularities.

    ``sqrt_delta`` fixes log|zeta| = log|(gamma + sqrt_delta) / (gamma - sqrt_delta)|.
    """

    coefficient: Callable[[Any], Any]
    registry: SingularityRegistry
    sqrt_delta: complex
    label: str

    @classmethod
    def general(cls, m: KummerModuli) -> "RegulatorDensity":
        return cls(lambda g: density_general(g, m), regulator_registry(m), m.sqrt_delta,
                   f"general({m.alpha}, {m.beta})")

    @classmethod
    def diagonal(cls, alpha: complex) -> "RegulatorDensity":
        return cls(lambda g: density_diagonal(g, alpha), diagonal_registry(alpha), 1j, f"diagonal({alpha})")

    def __call__(self, gamma: Any) -> Any:
        return self.coefficient(gamma)

    def log_zeta(self, gamma: Any) -> Any:
        gamma = np.asarray(gamma, dtype=complex)
        s = self.sqrt_delta
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.abs(gamma + s)) - np.log(np.abs(gamma - s))

    def pairing_integrand(self, gamma: Any) -> Any:
        """log|zeta| (-2i F): Re gives the psi density, Im the eta density (per dx dy)."""
        return self.log_zeta(gamma) * (-2j) * self.coefficient(gamma)
