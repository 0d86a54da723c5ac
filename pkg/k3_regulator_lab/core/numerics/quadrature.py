"""
quadrature.py
=========================
Adaptive one-dimensional quadrature for integrands with endpoint singularities.

Features
--------
- Nested tanh-sinh (double exponential) levels per piece; the level
  difference is the error estimate
- Breakpoints at interior registry points and a geometrically graded mesh
  toward registry points lying just outside the interval
- Optional exact endpoint complements: the integrand receives ``(x, x - a, b - x)``
  with both distances free of cancellation
- Extended precision through ``mpmath.quad``
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable

import mpmath
import numpy as np

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.types import (
    PrecisionMode,
    QuadratureResult,
    SingularityRegistry,
    is_infinite,
)

_T_MAX = 4.0
_H0 = 0.5
_GRADING_RATIO = 3.0
_EPS = np.finfo(float).eps


@lru_cache(maxsize=None)
def _level_nodes(level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Nodes added at a tanh-sinh level on [0, 1].

    Level 0 holds every multiple of ``_H0`` in [-T, T]; level j > 0 holds the
    odd multiples of ``_H0 / 2**j``. Returns (x, 1 - x, dx/dt).
    """
    if level == 0:
        n = int(round(_T_MAX / _H0))
        t = _H0 * np.arange(-n, n + 1, dtype=float)
    else:
        h = _H0 / 2**level
        n = int(round(_T_MAX / h))
        k = np.arange(-n + 1, n, 2, dtype=float)
        t = h * k
    u = 0.5 * math.pi * np.sinh(t)
    x = 1.0 / (1.0 + np.exp(-2.0 * u))
    xc = 1.0 / (1.0 + np.exp(2.0 * u))
    w = 0.25 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return x, xc, w


@dataclass(frozen=True)
class _Piece:
    """Sub-interval stored as offsets from both original endpoints."""

    la: float  # left end, distance from a
    ra: float  # right end, distance from a
    lb: float  # left end, distance from b
    rb: float  # right end, distance from b

    @property
    def width(self) -> float:
        return self.ra - self.la if self.ra <= self.lb else self.lb - self.rb

    def halves(self) -> tuple["_Piece", "_Piece"]:
        half = 0.5 * self.width
        mid_a = self.la + half
        mid_b = self.rb + half
        return _Piece(self.la, mid_a, self.lb, mid_b), _Piece(mid_a, self.ra, mid_b, self.rb)


def _initial_pieces(a: float, b: float, registry: SingularityRegistry | None) -> list[_Piece]:
    length = b - a
    cuts: list[tuple[float, float]] = [(0.0, length), (length, 0.0)]
    for loc in registry.locations() if registry is not None else []:
        if is_infinite(loc):
            continue
        p = complex(loc)
        offset = abs(p.imag)
        x = p.real
        margin = 1e-14 * max(length, abs(a), abs(b))
        if a + margin < x < b - margin and offset == 0.0:
            cuts.append((x - a, b - x))
            continue
        if x <= a + margin:
            d = (a - x) + offset
            near_a = True
        elif x >= b - margin:
            d = (x - b) + offset
            near_a = False
        else:
            # complex point hovering over the interior
            cuts.append((x - a, b - x))
            d = offset
            for o in _graded_offsets(d, min(x - a, b - x)):
                cuts.append((x - a - o, b - x + o))
                cuts.append((x - a + o, b - x - o))
            continue
        if d <= 0.0:
            continue
        for o in _graded_offsets(d, 0.5 * length):
            cuts.append((o, length - o) if near_a else (length - o, o))
    cuts = [c for c in cuts if 0.0 <= c[0] <= length and 0.0 <= c[1] <= length]
    cuts.sort(key=lambda c: c[0])
    pieces = []
    prev = cuts[0]
    for cut in cuts[1:]:
        if cut[0] - prev[0] <= 4.0 * _EPS * length:
            continue
        pieces.append(_Piece(prev[0], cut[0], prev[1], cut[1]))
        prev = cut
    return pieces


def _graded_offsets(d: float, limit: float) -> list[float]:
    offsets = []
    o = d
    while o < limit:
        offsets.append(o)
        o *= _GRADING_RATIO
    return offsets


def _integrate_piece(
    f: Callable[..., Any],
    piece: _Piece,
    a: float,
    b: float,
    rel_tol: float,
    abs_tol: float,
    max_level: int,
    with_complements: bool,
) -> tuple[Any, float, int, bool]:
    width = piece.width
    acc: Any = 0.0
    acc_abs = 0.0
    previous = None
    evals = 0
    estimate: Any = 0.0
    err = math.inf
    for level in range(max_level + 1):
        x01, xc01, w = _level_nodes(level)
        dl = piece.la + width * x01
        dr = piece.rb + width * xc01
        x = np.where(dl <= dr, a + dl, b - dr)
        if with_complements:
            values = np.broadcast_to(np.asarray(f(x, dl, dr)), x.shape)
        else:
            # nodes that round onto an endpoint are dropped
            inside = (x > a) & (x < b)
            sub = np.broadcast_to(np.asarray(f(x[inside])), x[inside].shape)
            values = np.zeros(x.shape, dtype=np.result_type(sub, float))
            values[inside] = sub
        evals += x.size
        if not np.all(np.isfinite(values)):
            return estimate, math.inf, evals, False
        acc = acc + np.sum(w * values)
        acc_abs += float(np.sum(w * np.abs(values)))
        h = _H0 / 2**level
        estimate = acc * h * width
        if previous is not None:
            err = abs(estimate - previous)
            floor = 64.0 * _EPS * acc_abs * h * width
            if level >= 2 and err <= max(rel_tol * abs(estimate), abs_tol, floor):
                return estimate, max(err, floor), evals, True
        previous = estimate
    return estimate, err, evals, False


def integrate_1d(
    f: Callable[..., Any],
    interval: tuple[Any, Any],
    registry: SingularityRegistry | None = None,
    rel_tol: float = 1e-10,
    *,
    abs_tol: float = 0.0,
    with_complements: bool = False,
    precision: PrecisionMode | str = PrecisionMode.DOUBLE,
    dps: int | None = None,
    max_level: int = 6,
    max_pieces: int = 400,
) -> QuadratureResult:
    """
    Adaptive quadrature of ``f`` over a finite interval.

    Parameters
    ----------
    f : callable
        Vectorized integrand ``f(x)`` (or ``f(x, x - a, b - x)`` when
        ``with_complements``). In extended precision ``f`` receives scalar
        mpmath numbers.
    interval : (a, b)
        Finite bounds with a < b.
    registry : SingularityRegistry, optional
        Real singular points; interior ones become breakpoints, nearby
        exterior ones grade the mesh.
    rel_tol : float
        Requested relative accuracy.
    abs_tol : float
        Absolute floor for integrals that vanish.
    with_complements : bool
        Pass exact distances to both endpoints to the integrand.
    precision : PrecisionMode
        ``double`` (tanh-sinh here) or ``extended`` (``mpmath.quad``).
    dps : int, optional
        Decimal digits for extended precision.

    Returns
    -------
    QuadratureResult
        Best estimate; ``converged`` is False if the budget ran out.
    """
    a, b = interval
    if PrecisionMode(precision) is PrecisionMode.EXTENDED:
        return _integrate_extended(f, a, b, registry, rel_tol, dps or settings.extended_dps)

    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        logger.error(f"[Quadrature] Invalid interval ({a}, {b})")
        raise DomainError(f"integrate_1d needs a finite interval with a < b, got ({a}, {b})")

    counter = itertools.count()
    heap: list[tuple[float, int, _Piece, Any, float]] = []
    total_evals = 0
    for piece in _initial_pieces(a, b, registry):
        value, err, evals, _ = _integrate_piece(
            f, piece, a, b, rel_tol, abs_tol, max_level, with_complements
        )
        total_evals += evals
        heapq.heappush(heap, (-err, next(counter), piece, value, err))

    def totals() -> tuple[Any, float]:
        values = [entry[3] for entry in heap]
        if any(np.iscomplexobj(v) for v in values):
            value = complex(
                math.fsum(complex(v).real for v in values),
                math.fsum(complex(v).imag for v in values),
            )
        else:
            value = math.fsum(float(v) for v in values)
        return value, math.fsum(entry[4] for entry in heap)

    value, err = totals()
    while err > max(rel_tol * abs(value), abs_tol) and len(heap) < max_pieces:
        neg_err, order, worst, worst_value, worst_err = heapq.heappop(heap)
        if worst.width <= 16.0 * _EPS * max(abs(a), abs(b), b - a):
            heapq.heappush(heap, (neg_err, order, worst, worst_value, worst_err))
            break
        for half in worst.halves():
            h_value, h_err, evals, _ = _integrate_piece(
                f, half, a, b, rel_tol, abs_tol, max_level, with_complements
            )
            total_evals += evals
            heapq.heappush(heap, (-h_err, next(counter), half, h_value, h_err))
        value, err = totals()

    converged = bool(err <= max(rel_tol * abs(value), abs_tol))
    if not converged:
        logger.warning(
            f"[Quadrature] Not converged on ({a}, {b}): value={value}, err={err:.3e}, "
            f"pieces={len(heap)}"
        )
    else:
        logger.debug(f"[Quadrature] ({a}, {b}) -> {value} ± {err:.2e} ({total_evals} evals)")
    return QuadratureResult(value=value, err_abs=float(err), evals=total_evals, converged=converged)


def _integrate_extended(
    f: Callable[[Any], Any],
    a: Any,
    b: Any,
    registry: SingularityRegistry | None,
    rel_tol: float,
    dps: int,
) -> QuadratureResult:
    evals = 0

    def counted(x: Any) -> Any:
        nonlocal evals
        evals += 1
        return f(x)

    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(a), mpmath.mpf(b)
        if not lo < hi:
            raise DomainError(f"integrate_1d needs a < b, got ({a}, {b})")
        points = [lo]
        for loc in registry.locations() if registry is not None else []:
            if is_infinite(loc):
                continue
            p = complex(loc)
            if p.imag == 0.0 and lo < p.real < hi:
                points.append(mpmath.mpf(p.real))
        points.append(hi)
        points.sort()
        value, err = mpmath.quad(counted, points, error=True)
        floor = mpmath.mpf(10) ** (-(dps - 3))
        converged = bool(err <= max(rel_tol * abs(value), floor))
    logger.debug(f"[Quadrature] extended ({a}, {b}) at {dps} digits -> err={mpmath.nstr(err, 3)}")
    return QuadratureResult(value=value, err_abs=float(err), evals=evals, converged=converged)
