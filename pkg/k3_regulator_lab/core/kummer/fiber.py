"""
fiber.py
=========================
Parametrization of the nodal mu = 1 fiber and its normalization.

Features
--------
- ``conic_param``: rational parametrization xi -> (x, y) of the conic C_1
- ``residual_xi``: the double cover gamma -> xi of the normalization
- ``fiber_point``: (x, y, z) on the affine Kummer quartic
- ``zeta_coord`` / ``zeta_inverse``: the coordinate that is 0 and infinity
  over the node and +-1 at the branch points
- residual helpers and the table of special points
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Union

from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.numerics.types import INFINITY, PointAtInfinity, SpherePoint, is_infinite

Coordinate = Union[complex, PointAtInfinity]

# values this close to a pole (relative) are mapped to the point at infinity
_POLE_TOL = 1e-12


def _relative(lhs: complex, rhs: complex) -> float:
    scale = abs(lhs) + abs(rhs)
    return 0.0 if scale == 0.0 else abs(lhs - rhs) / scale


def conic_param(xi: SpherePoint, m: KummerModuli) -> tuple[Coordinate, Coordinate]:
    """
    Point (x, y) of the conic R(x, y, 1) = x y with stereographic parameter ``xi``.

    ``xi = INFINITY`` gives (1, 0); a root of Delta(xi) gives (INFINITY, INFINITY).
    """
    a, b = m.alpha, m.beta
    if is_infinite(xi):
        return 1.0 + 0j, 0j
    xi = complex(xi)
    den = m.conic_denominator(xi)
    scale = abs(a) * abs(xi) ** 2 + abs(a * b * xi) + abs(b)
    if abs(den) <= _POLE_TOL * scale:
        return INFINITY, INFINITY
    x = a * (xi * xi + (b - 1.0) * xi) / den
    y = b * ((a - 1.0) * xi + 1.0) / den
    return x, y


def residual_xi(gamma: SpherePoint, m: KummerModuli) -> Coordinate:
    """xi(gamma) = (1 - beta gamma^2) / (gamma^2 - alpha); INFINITY when gamma^2 = alpha."""
    if is_infinite(gamma):
        return -m.beta
    g2 = complex(gamma) ** 2
    den = g2 - m.alpha
    if abs(den) <= _POLE_TOL * max(1.0, abs(m.alpha)):
        return INFINITY
    return (1.0 - m.beta * g2) / den


def gamma_squared_from_xi(xi: SpherePoint, m: KummerModuli) -> Coordinate:
    """Inverse of ``residual_xi`` on gamma^2: (1 + alpha xi) / (xi + beta)."""
    if is_infinite(xi):
        return m.alpha
    xi = complex(xi)
    if abs(xi + m.beta) <= _POLE_TOL * max(1.0, abs(m.beta)):
        return INFINITY
    return (1.0 + m.alpha * xi) / (xi + m.beta)


@dataclass(frozen=True)
class FiberPoint:
    gamma: SpherePoint
    xi: Coordinate
    x: Coordinate
    y: Coordinate
    z: Coordinate

    @property
    def xyz(self) -> tuple[Coordinate, Coordinate, Coordinate]:
        return self.x, self.y, self.z

    @property
    def at_infinity(self) -> bool:
        return any(is_infinite(c) for c in (self.x, self.y, self.z))


def fiber_point(gamma: SpherePoint, m: KummerModuli) -> FiberPoint:
    """
    Point of the I1 fiber over the normalization coordinate ``gamma``.

    z is evaluated as (alpha xi + beta)(1 - alpha beta) gamma / ((gamma^2 - alpha) Delta(xi)),
    which equals (alpha xi + beta)(xi + beta) gamma / Delta(xi) without the cancellation
    in xi + beta.
    """
    xi = residual_xi(gamma, m)
    if is_infinite(gamma):
        x, y = conic_param(xi, m)
        return FiberPoint(gamma, xi, x, y, 0j)
    gamma = complex(gamma)
    if is_infinite(xi):
        # gamma^2 = alpha: (x, y) = (1, 0) and z -> gamma
        return FiberPoint(gamma, xi, 1.0 + 0j, 0j, gamma)
    x, y = conic_param(xi, m)
    if is_infinite(x):
        return FiberPoint(gamma, xi, INFINITY, INFINITY, INFINITY)
    a, b = m.alpha, m.beta
    z = (a * xi + b) * (1.0 - a * b) * gamma / ((gamma * gamma - a) * m.conic_denominator(xi))
    return FiberPoint(gamma, xi, x, y, z)


def zeta_coord(gamma: SpherePoint, m: KummerModuli) -> Coordinate:
    """zeta = (gamma + sqrt(delta)) / (gamma - sqrt(delta)) with the moduli branch token."""
    if is_infinite(gamma):
        return 1.0 + 0j
    s = m.sqrt_delta
    gamma = complex(gamma)
    if abs(gamma - s) <= _POLE_TOL * max(1.0, abs(s)):
        return INFINITY
    return (gamma + s) / (gamma - s)


def zeta_inverse(zeta: SpherePoint, m: KummerModuli) -> Coordinate:
    """gamma = sqrt(delta) (zeta + 1) / (zeta - 1)."""
    s = m.sqrt_delta
    if is_infinite(zeta):
        return s
    zeta = complex(zeta)
    if abs(zeta - 1.0) <= _POLE_TOL:
        return INFINITY
    return s * (zeta + 1.0) / (zeta - 1.0)


def kummer_residual(x: complex, y: complex, z: complex, m: KummerModuli) -> float:
    """Relative residual of z^2 x y = (x - 1)(x - alpha)(y - 1)(y - beta)."""
    lhs = z * z * x * y
    rhs = (x - 1.0) * (x - m.alpha) * (y - 1.0) * (y - m.beta)
    return _relative(lhs, rhs)


def biquadratic_residual(xi: complex, z: complex, m: KummerModuli) -> float:
    """Relative residual of Delta(xi)^2 z^2 = (xi + beta)(1 + alpha xi)(beta + alpha xi)^2."""
    a, b = m.alpha, m.beta
    lhs = m.conic_denominator(xi) ** 2 * z * z
    rhs = (xi + b) * (1.0 + a * xi) * (b + a * xi) ** 2
    return _relative(lhs, rhs)


def conic_membership_residual(x: complex, y: complex, m: KummerModuli) -> float:
    """Relative residual of R(x, y, 1) = x y on the conic C_1."""
    a, b = m.alpha, m.beta
    terms = [
        -x * x / a,
        -y * y / b,
        (a + 1.0) / a * x,
        (b + 1.0) / b * y,
        -1.0 + 0j,
        -x * y,
    ]
    total = sum(terms)
    scale = sum(abs(t) for t in terms)
    return 0.0 if scale == 0.0 else abs(total) / scale


@dataclass(frozen=True)
class SpecialPointRow:
    label: str
    gamma_squared: Coordinate
    xi: Coordinate
    xy: tuple[Coordinate, Coordinate]
    expected_xi: Coordinate
    expected_xy: tuple[Coordinate, Coordinate]
    error: float


def _distance(a: Coordinate, b: Coordinate) -> float:
    if is_infinite(a) or is_infinite(b):
        return 0.0 if (is_infinite(a) and is_infinite(b)) else float("inf")
    return abs(complex(a) - complex(b)) / max(1.0, abs(complex(b)))


def _row(
    label: str, g2: Coordinate, expected_xi: Coordinate, expected_xy, m: KummerModuli
) -> SpecialPointRow:
    gamma: SpherePoint = INFINITY if is_infinite(g2) else cmath.sqrt(complex(g2))
    xi = residual_xi(gamma, m)
    xy = conic_param(xi, m)
    error = max(
        _distance(xi, expected_xi),
        _distance(xy[0], expected_xy[0]),
        _distance(xy[1], expected_xy[1]),
    )
    return SpecialPointRow(label, g2, xi, xy, expected_xi, expected_xy, error)


def special_point_table(m: KummerModuli) -> list[SpecialPointRow]:
    """
    The eight (gamma^2, xi, (x, y)) rows computed by composition next to their closed forms.

    The last entry covers both roots of Delta(xi); its error is the worse of the two.
    """
    a, b = m.alpha, m.beta
    d = m.delta
    rows = [
        _row("0", 0j, -1.0 / a, (a * (1.0 - b) + 1.0, b), m),
        _row("inf", INFINITY, -b, (a, b * (1.0 - a) + 1.0), m),
        _row("delta", d, -b / a, (1.0 + 0j, 1.0 + 0j), m),
        _row("1/beta", 1.0 / b, 0j, (0j, 1.0 + 0j), m),
        _row("alpha", a, INFINITY, (1.0 + 0j, 0j), m),
        _row("1+alpha-alpha*beta", -a * b + a + 1.0, 1.0 - b, (0j, b), m),
        _row("1/(1+beta-alpha*beta)", 1.0 / (1.0 + b - a * b), 1.0 / (1.0 - a), (a, 0j), m),
    ]
    disc = cmath.sqrt(a * a * b * b - 4.0 * a * b)
    roots = [(-a * b + disc) / (2.0 * a), (-a * b - disc) / (2.0 * a)]
    sub = [_row("Delta roots", gamma_squared_from_xi(r, m), r, (INFINITY, INFINITY), m) for r in roots]
    worst = max(sub, key=lambda r: r.error)
    rows.append(worst)
    return rows
