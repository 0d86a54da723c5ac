"""
types.py
=========================
Shared value types of the numerical substrate.

- ``ComplexValue`` is a plain Python ``complex``; the point at infinity of
  the Riemann sphere is the explicit sentinel ``INFINITY`` (never a large
  float).
- ``SingularityRegistry`` annotates integrable singularities so adaptive
  quadrature can refine around them.
- ``QuadratureResult`` carries a value with an honest error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Sequence, Union

ComplexValue = complex


class PointAtInfinity(Enum):
    """Singleton flag for the point at infinity of the sphere."""

    INFINITY = "inf"

    def __repr__(self) -> str:
        return "INFINITY"


INFINITY = PointAtInfinity.INFINITY

SpherePoint = Union[complex, PointAtInfinity]


def is_infinite(value: Any) -> bool:
    """Return True when ``value`` is the point-at-infinity sentinel."""
    return value is INFINITY


class PrecisionMode(str, Enum):
    """Arithmetic used by precision-aware operations."""

    DOUBLE = "double"
    EXTENDED = "extended"


class SingularityKind(str, Enum):
    """Integrable singularity types understood by the quadrature rules."""

    INVERSE_MODULUS = "inverse-modulus"
    LOGARITHMIC = "logarithmic"
    SQRT_ENDPOINT = "sqrt-endpoint"


@dataclass(frozen=True)
class Singularity:
    location: SpherePoint
    kind: SingularityKind


@dataclass(frozen=True)
class SingularityRegistry:
    """
    Immutable list of (location, kind) annotations.

    Locations are complex numbers (real numbers for 1D use) or ``INFINITY``.
    """

    entries: tuple[Singularity, ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, points: Iterable[SpherePoint], kind: SingularityKind) -> "SingularityRegistry":
        return cls(tuple(Singularity(p, kind) for p in points))

    def add(self, location: SpherePoint, kind: SingularityKind) -> "SingularityRegistry":
        return SingularityRegistry(self.entries + (Singularity(location, kind),))

    def extend(self, other: "SingularityRegistry") -> "SingularityRegistry":
        return SingularityRegistry(self.entries + other.entries)

    def mapped(self, fn: Callable[[SpherePoint], SpherePoint | None]) -> "SingularityRegistry":
        """Apply a chart change; entries mapped to ``None`` are dropped."""
        out = []
        for entry in self.entries:
            image = fn(entry.location)
            if image is not None:
                out.append(Singularity(image, entry.kind))
        return SingularityRegistry(tuple(out))

    def locations(self, rel_tol: float = 1e-13) -> list[SpherePoint]:
        """Distinct locations in registration order (near-duplicates merged)."""
        unique: list[SpherePoint] = []
        for entry in self.entries:
            loc = entry.location
            if is_infinite(loc):
                if not any(is_infinite(u) for u in unique):
                    unique.append(loc)
                continue
            z = complex(loc)
            duplicate = any(
                not is_infinite(u) and abs(complex(u) - z) <= rel_tol * max(1.0, abs(z))
                for u in unique
            )
            if not duplicate:
                unique.append(z)
        return unique

    def kinds_at(self, location: SpherePoint, rel_tol: float = 1e-13) -> set[SingularityKind]:
        kinds = set()
        for entry in self.entries:
            if is_infinite(location) or is_infinite(entry.location):
                if entry.location is location:
                    kinds.add(entry.kind)
                continue
            z = complex(location)
            if abs(complex(entry.location) - z) <= rel_tol * max(1.0, abs(z)):
                kinds.add(entry.kind)
        return kinds

    def __iter__(self) -> Iterator[Singularity]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class QuadratureResult:
    """
    Value of an integral with an absolute error estimate.

    ``converged`` implies ``err_abs`` is within the requested tolerance.
    ``abs_mass`` estimates the integral of |f| (0.0 when not tracked); it
    sets the floor below which cancelling integrals count as converged.
    """

    value: Any
    err_abs: float
    evals: int
    converged: bool
    abs_mass: float = 0.0

    @classmethod
    def combine(cls, results: Sequence["QuadratureResult"]) -> "QuadratureResult":
        """Sum of independent pieces, reduced in the given (fixed) order."""
        values = [r.value for r in results]
        if any(isinstance(v, complex) for v in values):
            total: Any = complex(
                math.fsum(complex(v).real for v in values),
                math.fsum(complex(v).imag for v in values),
            )
        elif all(isinstance(v, float) for v in values):
            total = math.fsum(values)
        else:
            total = sum(values[1:], values[0]) if values else 0.0
        return cls(
            value=total,
            err_abs=math.fsum(r.err_abs for r in results),
            evals=sum(r.evals for r in results),
            converged=all(r.converged for r in results),
            abs_mass=math.fsum(r.abs_mass for r in results),
        )
