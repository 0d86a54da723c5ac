"""
continued_fraction.py
=========================
Continued-fraction expansion with an explicit trust count.

The input is enclosed in an interval of exact ``Fraction``s (a point for
ints and Fractions, the last-bit uncertainty for floats and mpmath numbers).
A term is trusted while both interval ends share the same floor; the
expansion of the point estimate also terminates when it hits an integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import mpmath

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError


@dataclass(frozen=True)
class ContinuedFraction:
    terms: tuple[int, ...]
    trusted: int
    terminated: bool

    def __str__(self) -> str:
        if not self.terms:
            return "[]"
        head, *tail = self.terms
        return f"[{head}; {', '.join(map(str, tail))}]" if tail else f"[{head}]"


def _enclosure(x: Any, rel_err: float | None) -> tuple[Fraction, Fraction, Fraction]:
    if isinstance(x, bool):
        raise DomainError("continued_fraction expects a number, got a bool")
    if isinstance(x, (int, Fraction)):
        mid = Fraction(x)
        half = Fraction(0)
    elif isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            raise DomainError(f"continued_fraction needs a finite value, got {x}")
        man, exp = x.man_exp
        mid = Fraction(int(man)) * Fraction(2) ** int(exp)
        half = abs(mid) * Fraction(2) ** (1 - mpmath.mp.prec)
    else:
        value = float(x)
        if not math.isfinite(value):
            raise DomainError(f"continued_fraction needs a finite value, got {x}")
        mid = Fraction(value)
        half = Fraction(math.ulp(value))
    if rel_err is not None:
        half = max(half, abs(mid) * Fraction(rel_err))
    return mid - half, mid, mid + half


def continued_fraction(x: Any, n_terms: int = 20, rel_err: float | None = None) -> ContinuedFraction:
    """
    Continued-fraction terms of ``x`` that its precision supports.

    Parameters
    ----------
    x : int | Fraction | float | mpmath.mpf
        Value to expand.
    n_terms : int
        Maximum number of terms.
    rel_err : float, optional
        Known relative uncertainty of ``x`` (widens the enclosure).

    Returns
    -------
    ContinuedFraction
        ``terms`` are all trustworthy; ``terminated`` is True when the point
        estimate is exactly the rational they describe.

    Raises
    ------
    DomainError
        For a non-finite or non-positive ``x``.
    """
    lo, mid, hi = _enclosure(x, rel_err)
    if mid <= 0:
        logger.error(f"[ContinuedFraction] non-positive input {x}")
        raise DomainError(f"continued_fraction needs x > 0, got {x}")
    terms: list[int] = []
    terminated = False
    while len(terms) < n_terms:
        a = math.floor(mid)
        if mid == a:
            terms.append(a)
            terminated = True
            break
        if math.floor(lo) != a or math.floor(hi) != a:
            break
        terms.append(a)
        lo, mid, hi = lo - a, mid - a, hi - a
        if lo <= 0:
            break
        lo, mid, hi = 1 / hi, 1 / mid, 1 / lo
    return ContinuedFraction(terms=tuple(terms), trusted=len(terms), terminated=terminated)


def convergents(terms: Sequence[int]) -> list[Fraction]:
    """Successive convergents p_k / q_k of a continued fraction."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in terms:
        p_prev, p = a * p_prev + p, p_prev
        q_prev, q = a * q_prev + q, q_prev
        out.append(Fraction(p_prev, q_prev))
    return out


def common_prefix(*expansions: ContinuedFraction) -> tuple[int, ...]:
    """Leading terms shared by every expansion."""
    prefix: list[int] = []
    for column in zip(*(e.terms for e in expansions)):
        if len(set(column)) != 1:
            break
        prefix.append(column[0])
    return tuple(prefix)
