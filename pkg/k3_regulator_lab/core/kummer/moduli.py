"""
moduli.py
=========================
Parameter points (alpha, beta) of the Kummer family and the derived delta.

The branch of sqrt(delta) is fixed once per moduli point: the principal root
times ``sqrt_delta_sign``. Every downstream formula reads it from here.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DegenerateParameterError, DomainError

_TOL = 1e-12


def _near(a: complex, b: complex) -> bool:
    return abs(a - b) <= _TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class KummerModuli:
    """
    Moduli point (alpha, beta) with alpha, beta not in {0, 1}.

    Attributes
    ----------
    alpha, beta : complex
        Legendre parameters of the two elliptic factors.
    sqrt_delta_sign : int
        Branch token (+1 or -1) applied to the principal sqrt(delta).
    """

    alpha: complex
    beta: complex
    sqrt_delta_sign: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not cmath.isfinite(value) or _near(value, 0.0) or _near(value, 1.0):
                logger.error(f"[Moduli] {name}={value} lies in {{0, 1, inf}}")
                raise DomainError(f"{name} must avoid 0, 1 and infinity, got {value}")
        if self.sqrt_delta_sign not in (1, -1):
            raise DomainError(f"sqrt_delta_sign must be +1 or -1, got {self.sqrt_delta_sign}")

    @classmethod
    def diagonal(cls, alpha: complex, sqrt_delta_sign: int = 1) -> "KummerModuli":
        return cls(alpha, alpha, sqrt_delta_sign)

    @property
    def is_diagonal(self) -> bool:
        return _near(self.alpha, self.beta)

    @property
    def cycle_valid(self) -> bool:
        """
        False where the cycle on the mu = 1 fiber degenerates.

        Excludes 1 in {1/alpha, 1/beta, 1/(alpha beta), (alpha beta + 1)/(alpha beta),
        (alpha + beta)/(alpha beta)}; the fourth never equals 1.
        """
        ab = self.alpha * self.beta
        return not (_near(ab, 1.0) or _near(self.alpha + self.beta, ab))

    def require_cycle_valid(self) -> "KummerModuli":
        if not self.cycle_valid:
            logger.error(f"[Moduli] Cycle undefined at alpha={self.alpha}, beta={self.beta}")
            raise DomainError(f"cycle undefined at alpha={self.alpha}, beta={self.beta}")
        return self

    @property
    def delta(self) -> complex:
        return delta(self)

    @property
    def sqrt_delta(self) -> complex:
        return self.sqrt_delta_sign * cmath.sqrt(delta(self))

    def conic_denominator(self, xi: complex) -> complex:
        """Conic denominator alpha xi^2 + alpha beta xi + beta."""
        return self.alpha * xi * xi + self.alpha * self.beta * xi + self.beta


def delta(m: KummerModuli) -> complex:
    """
    delta = (alpha beta - alpha) / (beta - alpha beta).

    Raises
    ------
    DegenerateParameterError
        If beta (1 - alpha) vanishes.
    """
    den = m.beta - m.alpha * m.beta
    if abs(den) <= _TOL * max(1.0, abs(m.beta)):
        logger.error(f"[Moduli] delta undefined: beta(1 - alpha) = {den}")
        raise DegenerateParameterError(f"delta undefined for alpha={m.alpha}, beta={m.beta}")
    if m.is_diagonal:
        return -1.0 + 0j
    return (m.alpha * m.beta - m.alpha) / den
