"""
periods.py
=========================
Weierstrass slice y^2 = 4x^3 - g2 x - g3 with prescribed J-invariant and its
normalized real period g2^(1/4) int dx/y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.elliptic import cubic_half_periods
from k3_regulator_lab.core.numerics.quadrature import integrate_1d


@dataclass(frozen=True)
class WeierstrassSlice:
    """g2 = g3 = 27 j / (j - 1), which gives g2^3 / (g2^3 - 27 g3^2) = j."""

    j: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.j) and self.j > 1.0):
            raise DomainError(f"the real Weierstrass slice needs j > 1, got {self.j}")

    @property
    def g2(self) -> float:
        return 27.0 * self.j / (self.j - 1.0)

    @property
    def g3(self) -> float:
        return self.g2

    @property
    def j_invariant(self) -> float:
        g2, g3 = self.g2, self.g3
        return g2**3 / (g2**3 - 27.0 * g3 * g3)

    def roots(self) -> tuple[float, float, float]:
        """Real roots e1 > e2 > e3 of 4x^3 - g2 x - g3 (three real roots for j > 1)."""
        c = self.g2
        # x^3 - (c/4) x - c/4 = 0, trigonometric form
        p = c / 4.0
        radius = 2.0 * math.sqrt(p / 3.0)
        arg = (3.0 * (c / 4.0) / (2.0 * p)) * math.sqrt(3.0 / p)
        phi = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = sorted((radius * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)), reverse=True)
        return roots[0], roots[1], roots[2]


def real_period(j: float) -> float:
    """2 int_{e1}^inf dx / y, computed by AGM."""
    e1, e2, e3 = WeierstrassSlice(j).roots()
    a1, _ = cubic_half_periods(e1, e2, e3)
    return a1


def real_period_quadrature(j: float, rel_tol: float = 1e-12) -> float:
    """The same period as int_{e3}^{e2} dx / sqrt|(x - e1)(x - e2)(x - e3)| by 1D quadrature."""
    e1, e2, e3 = WeierstrassSlice(j).roots()

    def f(x: np.ndarray, from_lo: np.ndarray, to_hi: np.ndarray) -> np.ndarray:
        return 1.0 / np.sqrt(from_lo * to_hi * (e1 - x))

    return float(integrate_1d(f, (e3, e2), rel_tol=rel_tol, with_complements=True).value)


def normalized_period(j: float) -> float:
    """g2(j)^(1/4) times the real period; a solution of the decoupled operator."""
    return WeierstrassSlice(j).g2 ** 0.25 * real_period(j)
