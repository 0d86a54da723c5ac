"""
elliptic.py
=========================
Arithmetic-geometric mean and the elliptic integrals built on it.

Features
--------
- ``agm``: quadratically convergent AGM iteration
- ``elliptic_K``: complete elliptic integral of the first kind
- ``cubic_half_periods``: real half-periods of y^2 = (x-e1)(x-e2)(x-e3)
"""

from __future__ import annotations

import math

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError

_MAX_AGM_STEPS = 64


def agm(a: float, b: float) -> float:
    """
    Arithmetic-geometric mean of two positive reals.

    The iteration is stateless, so ``agm(a, b) == agm((a + b) / 2, sqrt(a * b))``
    holds exactly whenever ``a != b``.

    Parameters
    ----------
    a, b : float
        Positive arguments.

    Returns
    -------
    float
        The common limit of the arithmetic and geometric means.

    Raises
    ------
    DomainError
        If either argument is not a positive finite number.
    """
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        logger.error(f"[AGM] Nonpositive or non-finite input: a={a}, b={b}")
        raise DomainError(f"agm requires positive finite arguments, got ({a}, {b})")
    a, b = float(a), float(b)
    for _ in range(_MAX_AGM_STEPS):
        if abs(a - b) <= 4.0 * math.ulp(max(a, b)):
            return 0.5 * (a + b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_K(k: float) -> float:
    """
    Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k')).

    Parameters
    ----------
    k : float
        Modulus in [0, 1).

    Raises
    ------
    DomainError
        If k is outside [0, 1).
    """
    if not 0.0 <= k < 1.0:
        logger.error(f"[Elliptic] Modulus outside [0, 1): k={k}")
        raise DomainError(f"elliptic_K requires 0 <= k < 1, got {k}")
    k_prime = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * agm(1.0, k_prime))


def cubic_half_periods(e1: float, e2: float, e3: float) -> tuple[float, float]:
    """
    Real half-period integrals of the monic cubic with real roots e1 > e2 > e3.

    Returns
    -------
    (float, float)
        ``(A1, A2)`` with A1 = int_{e3}^{e2} dx/sqrt|c(x)| (which also equals
        int_{e1}^{inf}) and A2 = int_{e2}^{e1} dx/sqrt|c(x)|.
    """
    if not e1 > e2 > e3:
        raise DomainError(f"roots must satisfy e1 > e2 > e3, got ({e1}, {e2}, {e3})")
    s13 = math.sqrt(e1 - e3)
    a1 = math.pi / agm(s13, math.sqrt(e1 - e2))
    a2 = math.pi / agm(s13, math.sqrt(e2 - e3))
    return a1, a2
