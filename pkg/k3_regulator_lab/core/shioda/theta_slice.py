"""
theta_slice.py
=========================
The alternate fibration 2y^2 = w Q_theta(w) of the Shioda-Inose surface and
its link to the Kummer fibration.

Features
--------
- ``ThetaSlice``: P(theta) = 4 theta^3 - 3a theta - b and Q_theta(w) = w^2 + 2P w + 1
- ``q_roots``: the roots r-, r+ of Q_theta (r- r+ = 1), computed without cancellation
- ``theta_to_mu``: the affine map theta -> q theta + p onto the Kummer base
- ``j_legendre``, ``j_consistency``, ``shioda_parameters``: the J-relations
  between (alpha, beta) and (a, b)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError


@dataclass(frozen=True)
class ThetaSlice:
    a: float = 1.0
    b: float = 0.0

    def P(self, theta: Any) -> Any:
        return 4.0 * theta**3 - 3.0 * self.a * theta - self.b

    def Q(self, theta: Any, w: Any) -> Any:
        return w * w + 2.0 * self.P(theta) * w + 1.0

    def p_excess(self, eps: Any) -> Any:
        """P(1 + eps) - 1 expanded in eps, exact near eps = 0."""
        const = 4.0 - 3.0 * self.a - self.b - 1.0
        return const + (12.0 - 3.0 * self.a) * eps + 12.0 * eps * eps + 4.0 * eps**3

    def singular_thetas(self) -> list[tuple[float, int]]:
        """Real roots of P^2 - 1 with multiplicity (1 for I1 fibers, 2 for I2)."""
        out: list[tuple[float, int]] = []
        for sign in (1.0, -1.0):
            coeffs = [4.0, 0.0, -3.0 * self.a, -self.b - sign]
            for r in np.roots(coeffs):
                if abs(r.imag) > 1e-6:
                    continue
                x = float(r.real)
                for i, (y, mult) in enumerate(out):
                    if abs(x - y) <= 1e-6:
                        out[i] = (0.5 * (x + y), mult + 1)
                        break
                else:
                    out.append((x, 1))
        return sorted(out)

    @property
    def is_rank20(self) -> bool:
        return self.a == 1.0 and self.b == 0.0


@dataclass(frozen=True)
class RootPair:
    r_minus: complex | float
    r_plus: complex | float
    complex_roots: bool

    @property
    def gap(self) -> float:
        return float(abs(self.r_plus - self.r_minus))


def roots_from_p(p: float, p_minus_one: float | None = None) -> RootPair:
    """
    Roots of w^2 + 2 p w + 1.

    ``p_minus_one`` (p - 1 known exactly) keeps the gap r+ - r- accurate when
    the roots nearly collide.
    """
    if p_minus_one is None:
        p_minus_one = p - 1.0
    if p >= 1.0 or p <= -1.0:
        if p > 0:
            # sqrt(p^2 - 1) = sqrt((p - 1)(p + 1)) without overflow for large p
            root = math.sqrt(max(p_minus_one, 0.0)) * math.sqrt(p + 1.0)
            r_minus = -(p + root)
            return RootPair(r_minus, 1.0 / r_minus, False)
        root = -p * math.sqrt((1.0 - 1.0 / p) * (1.0 + 1.0 / p))
        r_plus = -p + root
        return RootPair(1.0 / r_plus, r_plus, False)
    im = math.sqrt((1.0 - p) * (1.0 + p))
    logger.debug(f"[Theta] P={p} in (-1, 1): complex conjugate roots")
    return RootPair(complex(-p, -im), complex(-p, im), True)


def q_roots(theta: float, slice_: ThetaSlice | None = None) -> RootPair:
    """Roots r- <= r+ of Q_theta; both negative for theta >= 1 on the a = 1, b = 0 slice."""
    slice_ = slice_ or ThetaSlice()
    theta = float(theta)
    return roots_from_p(slice_.P(theta), slice_.p_excess(theta - 1.0))


def theta_to_mu(theta: Any, p: float = 3.0, q: float = -2.0) -> Any:
    """mu = q theta + p."""
    return q * theta + p


def j_legendre(lam: complex) -> complex:
    """j = 256 (lam^2 - lam + 1)^3 / (lam^2 (lam - 1)^2)."""
    lam = complex(lam)
    if lam == 0 or lam == 1:
        raise DomainError(f"j_legendre is singular at lambda={lam}")
    value = 256.0 * (lam * lam - lam + 1.0) ** 3 / (lam * lam * (lam - 1.0) ** 2)
    return value.real if value.imag == 0 else value


def big_j(lam: complex) -> complex:
    """J = j / 1728."""
    return j_legendre(lam) / 1728.0


def j_consistency(alpha: float, beta: float, a: complex, b: complex) -> tuple[float, float]:
    """
    Residuals of J(E_alpha) + J(E_beta) = a^3 - b^2 + 1 and J(E_alpha) J(E_beta) = a^3.
    """
    ja, jb = big_j(alpha), big_j(beta)
    a3, b2 = complex(a) ** 3, complex(b) ** 2
    return abs(ja + jb - (a3 - b2 + 1.0)), abs(ja * jb - a3)


def shioda_parameters(alpha: float, beta: float) -> tuple[complex, complex]:
    """(a, b) solving the J relations; principal cube and square roots."""
    ja, jb = big_j(alpha), big_j(beta)
    a3 = ja * jb
    b2 = a3 + 1.0 - ja - jb
    a3c = complex(a3)
    a = a3c.real ** (1.0 / 3.0) if a3c.imag == 0 and a3c.real >= 0 else a3c ** (1.0 / 3.0)
    b = cmath.sqrt(b2)
    return a, (b.real if b.imag == 0 else b)
