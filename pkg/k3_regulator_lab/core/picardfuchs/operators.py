"""
operators.py
=========================
Picard-Fuchs operators of the M-polarized family, transcribed with exact
rational coefficients.

Features
--------
- ``decoupled_operator``: the second-order operator in j each factor satisfies
- ``cubic_ode``: the third-order operator along the Hauptmodul t
- ``quartic_ode`` and ``factor_odes``: the fourth-order operator in s and
  its two second-order tensor factors
- ``PFSuite``: the five operators by name, plus coefficient tables
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import pandas as pd

from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.odes import RationalODE


def decoupled_operator() -> RationalODE:
    """72 j (2 (j - 1) j f'' + (2 j - 1) f') - 5 f."""
    return RationalODE.from_expressions(
        "decoupled",
        ["-5", "72*j*(2*j - 1)", "72*j*2*(j - 1)*j"],
        variable="j",
    )


def cubic_ode() -> RationalODE:
    """
    f''' + 3(3t + 128)/(2t(t + 64)) f'' + (13t + 256)/(4t^2(t + 64)) f'
    + 1/(8t^2(t + 64)) f.
    """
    return RationalODE.from_expressions(
        "cubic_Yt",
        [
            "1/(8*t**2*(t + 64))",
            "(13*t + 256)/(4*t**2*(t + 64))",
            "3*(3*t + 128)/(2*t*(t + 64))",
            "1",
        ],
        variable="t",
    )


def quartic_ode() -> RationalODE:
    """The fourth-order operator in s, monic in f''''."""
    return RationalODE.from_expressions(
        "quartic_sigma1",
        [
            "385*(s - 1)**2/(20736*s**4*(s + 1)**2)",
            "(167*s**2 - 239*s - 118)/(36*s**2*(s - 1)*(s + 1)**2)",
            "(1031*s**3 - 553*s**2 - 1175*s - 167)/(72*s**2*(s - 1)*(s + 1)**2)",
            "2*(4*s**2 - 3*s - 2)/(s*(s - 1)*(s + 1))",
            "1",
        ],
        variable="s",
    )


def factor_odes() -> tuple[RationalODE, RationalODE]:
    """
    f'' + (3s + 1)/(2s(s + 1)) f' + 5/(144 s (s + 1)) f and the same with
    s^2 in the last denominator.
    """
    first = RationalODE.from_expressions(
        "factor1",
        ["5/(144*s*(s + 1))", "(3*s + 1)/(2*s*(s + 1))", "1"],
        variable="s",
    )
    second = RationalODE.from_expressions(
        "factor2",
        ["5/(144*s**2*(s + 1))", "(3*s + 1)/(2*s*(s + 1))", "1"],
        variable="s",
    )
    return first, second


@dataclass(frozen=True)
class PFSuite:
    decoupled: RationalODE
    cubic_Yt: RationalODE
    quartic_sigma1: RationalODE
    factor1: RationalODE
    factor2: RationalODE

    @classmethod
    @lru_cache(maxsize=1)
    def build(cls) -> "PFSuite":
        f1, f2 = factor_odes()
        return cls(decoupled_operator(), cubic_ode(), quartic_ode(), f1, f2)

    @property
    def names(self) -> list[str]:
        return ["decoupled", "cubic_Yt", "quartic_sigma1", "factor1", "factor2"]

    def get(self, name: str) -> RationalODE:
        if name not in self.names:
            raise DomainError(f"unknown operator {name!r}; known: {self.names}")
        return getattr(self, name)

    def coefficient_table(self, name: str, points: Sequence[float]) -> pd.DataFrame:
        """c_k(x) of operator ``name`` at each point, one column per derivative order."""
        ode = self.get(name)
        rows = []
        for x in points:
            c = ode.coefficients_at(float(x))
            rows.append({ode.variable.name: float(x), **{f"c{k}": float(c[k]) for k in range(ode.order + 1)}})
        return pd.DataFrame(rows)
