"""
census.py
=========================
Singular fibers of the elliptic fibration [R(X, Y, W) : XY] and the branch
points of each fiber over its conic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.numerics.types import INFINITY, PointAtInfinity, SpherePoint, is_infinite

MERGE_TOL = 1e-9


@dataclass(frozen=True)
class CensusEntry:
    mu: Union[complex, PointAtInfinity]
    kodaira_type: str
    multiplicity: int


@dataclass(frozen=True)
class FiberCensus:
    entries: tuple[CensusEntry, ...]

    def finite_values(self) -> list[complex]:
        """Finite singular mu values repeated by multiplicity."""
        out: list[complex] = []
        for e in self.entries:
            if not is_infinite(e.mu):
                out.extend([complex(e.mu)] * e.multiplicity)
        return out

    def types(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e.kodaira_type] = counts.get(e.kodaira_type, 0) + 1
        return counts

    def type_at(self, mu: SpherePoint) -> str | None:
        for e in self.entries:
            if is_infinite(mu) and is_infinite(e.mu):
                return e.kodaira_type
            if not is_infinite(mu) and not is_infinite(e.mu) and _close(complex(e.mu), complex(mu)):
                return e.kodaira_type
        return None


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= MERGE_TOL * max(1.0, abs(a), abs(b))


def singular_values(m: KummerModuli) -> list[complex]:
    """The six finite singular mu, unmerged."""
    a, b = m.alpha, m.beta
    ab = a * b
    return [1.0 + 0j, 1.0 / a, 1.0 / b, 1.0 / ab, (ab + 1.0) / ab, (a + b) / ab]


def singular_fibers(m: KummerModuli) -> FiberCensus:
    """
    Kodaira census of the fibration.

    Finite values that coincide (relative tolerance 1e-9) are merged: k coincident
    values give type I_{2k}. The fiber at infinity is I6*.
    """
    groups: list[list[complex]] = []
    for mu in singular_values(m):
        for group in groups:
            if _close(group[0], mu):
                group.append(mu)
                break
        else:
            groups.append([mu])
    entries = [
        CensusEntry(mu=sum(g) / len(g), kodaira_type=f"I{2 * len(g)}", multiplicity=len(g))
        for g in groups
    ]
    entries.sort(key=lambda e: (complex(e.mu).real, complex(e.mu).imag))
    entries.append(CensusEntry(mu=INFINITY, kodaira_type="I6*", multiplicity=1))
    merged = [e for e in entries if e.multiplicity > 1]
    if merged:
        logger.debug(f"[Census] alpha={m.alpha}, beta={m.beta}: merged fibers {merged}")
    return FiberCensus(tuple(entries))


def branch_points(mu: complex, m: KummerModuli) -> list[tuple[complex, complex]]:
    """The four branch points (x, y) of the fiber over ``mu`` on the conic C_mu."""
    a, b = m.alpha, m.beta
    mu = complex(mu)
    return [
        (1.0 + 0j, (1.0 - mu) * b + 1.0),
        (a, (1.0 - mu * a) * b + 1.0),
        ((1.0 - mu) * a + 1.0, 1.0 + 0j),
        ((1.0 - mu * b) * a + 1.0, b),
    ]
