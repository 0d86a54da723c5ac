"""
modular.py
=========================
The modular j-function on the imaginary axis from q-expansions.

E4 = 1 + 240 sum sigma_3(n) q^n and Delta = q prod (1 - q^n)^24 are truncated
once a tail bound drops below ``tail_tol``; j = E4^3 / Delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError

# zeta(3) < 1.21 bounds sigma_3(n) / n^3
_ZETA3_BOUND = 1.21
_MAX_TERMS = 10_000


@dataclass(frozen=True)
class QSeriesValue:
    value: float
    terms: int
    tail_bound: float


def nome(tau: complex) -> float:
    """q = exp(2 pi i tau) for tau on the imaginary axis with Im tau >= 1."""
    tau = complex(tau)
    if tau.real != 0.0:
        logger.error(f"[Modular] tau={tau} is off the imaginary axis")
        raise DomainError(f"j_function only supports purely imaginary tau, got {tau}")
    if tau.imag < 1.0:
        logger.error(f"[Modular] Im tau={tau.imag} < 1 leaves the truncation bound")
        raise DomainError(f"j_function needs Im(tau) >= 1, got {tau.imag}")
    return math.exp(-2.0 * math.pi * tau.imag)


def _sigma3(n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**3
            other = n // d
            if other != d:
                total += other**3
        d += 1
    return total


def eisenstein_e4(q: float, tail_tol: float = 1e-12) -> QSeriesValue:
    """Truncated E4(q) with a bound on the neglected tail."""
    ratio = 8.0 * q
    if not 0.0 <= q < 0.1:
        raise DomainError(f"q={q} outside the convergence window of the truncation bound")
    terms = [1.0]
    n = 0
    bound = math.inf
    while n < _MAX_TERMS:
        n += 1
        terms.append(240.0 * _sigma3(n) * q**n)
        bound = 240.0 * _ZETA3_BOUND * (n + 1) ** 3 * q ** (n + 1) / (1.0 - ratio)
        if bound < tail_tol:
            break
    return QSeriesValue(value=math.fsum(terms), terms=n, tail_bound=bound)


def q_product(q: float, sign: float, power: int, tail_tol: float = 1e-12) -> QSeriesValue:
    """
    prod_{n>=1} (1 + sign q^n)^power with a bound on the relative tail.

    The bound uses |log prod_{n>N}| <= |power| q^(N+1) / (1 - q)^2.
    """
    if not 0.0 <= q < 0.1:
        raise DomainError(f"q={q} outside the convergence window of the truncation bound")
    logs = []
    n = 0
    bound = math.inf
    while n < _MAX_TERMS:
        n += 1
        logs.append(power * math.log1p(sign * q**n))
        bound = abs(power) * q ** (n + 1) / (1.0 - q) ** 2
        if bound < tail_tol:
            break
    return QSeriesValue(value=math.exp(math.fsum(logs)), terms=n, tail_bound=bound)


def discriminant(q: float, tail_tol: float = 1e-12) -> QSeriesValue:
    """Delta(q) = q prod (1 - q^n)^24."""
    prod = q_product(q, -1.0, 24, tail_tol)
    return QSeriesValue(value=q * prod.value, terms=prod.terms, tail_bound=prod.tail_bound)


def j_function(tau: complex, tail_tol: float = 1e-12) -> float:
    """
    Klein's j-invariant at a purely imaginary tau with Im tau >= 1.

    Parameters
    ----------
    tau : complex
        Point of the upper half plane on the imaginary axis.
    tail_tol : float
        Truncation threshold for both q-series tails.

    Returns
    -------
    float
        j(tau), real on the imaginary axis.

    Raises
    ------
    DomainError
        If tau is off the axis or Im tau < 1.
    """
    q = nome(tau)
    e4 = eisenstein_e4(q, tail_tol)
    delta = discriminant(q, tail_tol)
    value = e4.value**3 / delta.value
    logger.debug(
        f"[Modular] j({tau}) = {value!r} using {e4.terms}/{delta.terms} terms "
        f"(tail bounds {e4.tail_bound:.1e}, {delta.tail_bound:.1e})"
    )
    return value
