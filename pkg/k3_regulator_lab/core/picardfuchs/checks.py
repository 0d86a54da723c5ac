"""
checks.py
=========================
Numerical verification of the Picard-Fuchs transcriptions and the
modular parametrization.

Features
--------
- ``decoupled_residual_table``: the decoupled operator on the normalized period
- ``tensor_product_check``: quartic operator on products of factor solutions,
  with exact derivative jets
- ``two_isogeny_check``: j(tau), j(2 tau) against the (sigma, pi) invariants
  of the modular parametrization, for both j normalizations
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import optimize

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.modular import j_function
from k3_regulator_lab.core.numerics.odes import ode_residual, solve_ivp
from k3_regulator_lab.core.picardfuchs.normal_form import (
    hauptmodul_t,
    modular_parametrization,
    symmetric_functions,
)
from k3_regulator_lab.core.picardfuchs.operators import PFSuite
from k3_regulator_lab.core.picardfuchs.periods import normalized_period

SCALINGS = (1.0, 1728.0)
SIGMA_TOL = 1e-6
# the Fricke fixed point: pi(t) decreases on (0, 64) and has its minimum there
_T_MAX = 64.0
_T_MIN = 1e-9


def decoupled_residual_table(
    js: Sequence[float] = (2.0, 5.0, 10.0),
    levels: Sequence[int] = (2, 3, 4),
) -> pd.DataFrame:
    """Normalized residual of the decoupled operator on ``normalized_period`` per (j, levels)."""
    ode = PFSuite.build().decoupled
    f = np.vectorize(normalized_period, otypes=[float])

    def row(j: float) -> dict[str, float]:
        out: dict[str, float] = {"j": float(j)}
        for lv in levels:
            out[f"levels_{lv}"] = ode_residual(ode, f, float(j), levels=lv)
        return out

    rows = Parallel(n_jobs=settings.n_jobs, prefer="threads")(delayed(row)(j) for j in js)
    table = pd.DataFrame(rows)
    logger.info(f"[PF] decoupled residuals:\n{table.to_string(index=False)}")
    return table


def _leibniz(f_jet: np.ndarray, g_jet: np.ndarray) -> np.ndarray:
    n = len(f_jet)
    return np.array(
        [math.fsum(math.comb(k, i) * f_jet[i] * g_jet[k - i] for i in range(k + 1)) for k in range(n)]
    )


@dataclass(frozen=True)
class TensorCheckReport:
    partner: str
    grid: list[float]
    residuals: list[float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        return self.max_residual < 1e-6


def tensor_product_check(
    interval: tuple[float, float] = (0.1, 0.5),
    init1: tuple[float, float] = (1.0, 0.3),
    init2: tuple[float, float] = (0.7, -0.2),
    *,
    partner: str = "factor2",
    n_points: int = 50,
    scale1: float = 1.0,
    scale2: float = 1.0,
) -> TensorCheckReport:
    """
    Residual of the quartic operator on f1 * f2 with f1, f2 solving the factors.

    ``partner="exp"`` replaces f2 by exp(s), which solves neither factor, as a
    negative control. The residual is |sum c_k (f1 f2)^(k)| / sum |c_k (f1 f2)^(k)|.
    """
    lo, hi = interval
    suite = PFSuite.build()
    for p in (0.0, 1.0, -1.0):
        if lo <= p <= hi:
            raise DomainError(f"interval {interval} contains the singular point s={p}")
    sol1 = solve_ivp(suite.factor1, init1[0], init1[1], interval)
    sol2 = solve_ivp(suite.factor2, init2[0], init2[1], interval) if partner == "factor2" else None
    if partner not in ("factor2", "exp"):
        raise DomainError(f"unknown partner {partner!r}")
    quartic = suite.quartic_sigma1
    grid = np.linspace(lo, hi, n_points)
    residuals = []
    for s in grid:
        f_jet = scale1 * sol1.jet(s, 4)
        if sol2 is not None:
            g_jet = scale2 * sol2.jet(s, 4)
        else:
            g_jet = scale2 * np.full(5, math.exp(s))
        total, scale = quartic.residual(float(s), _leibniz(f_jet, g_jet))
        residuals.append(0.0 if float(scale) == 0.0 else abs(float(total)) / float(scale))
    report = TensorCheckReport(partner=partner, grid=[float(s) for s in grid], residuals=residuals)
    logger.info(f"[PF] tensor check ({partner}): max residual {report.max_residual:.3e}")
    return report


def _log_pi(t: float) -> float:
    _, pi = symmetric_functions(modular_parametrization(t))
    return math.log(float(pi))


@dataclass(frozen=True)
class IsogenyMatch:
    scaling: float
    t: float | None
    sigma_residual: float

    @property
    def passed(self) -> bool:
        return self.t is not None and self.sigma_residual < SIGMA_TOL


@dataclass(frozen=True)
class IsogenyReport:
    tau: complex
    j1: float
    j2: float
    hauptmodul: float
    matches: list[IsogenyMatch] = field(default_factory=list)

    @property
    def passing_scalings(self) -> list[float]:
        return [m.scaling for m in self.matches if m.passed]


def two_isogeny_check(y: float, j2_perturbation: float = 0.0) -> IsogenyReport:
    """
    Match (J1, J2) = (j(iy)/s, j(2iy)/s) against the modular parametrization.

    t is root-found from the pi invariant (J1 J2), then the sigma invariant is
    compared with J1 + J2, for both scalings s in {1, 1728}.
    """
    if not 1.0 <= y <= 2.0:
        raise DomainError(f"two_isogeny_check expects y in [1, 2], got {y}")
    tau = 1j * y
    j1 = j_function(tau)
    j2 = j_function(2.0 * tau) * (1.0 + j2_perturbation)
    matches = []
    for s in SCALINGS:
        big_j1, big_j2 = j1 / s, j2 / s
        target = math.log(big_j1 * big_j2)

        def g(t: float, target: float = target) -> float:
            return _log_pi(t) - target

        if g(_T_MIN) * g(_T_MAX) > 0:
            logger.debug(f"[PF] scaling {s}: pi invariant {big_j1 * big_j2:.6g} not attained on (0, 64)")
            matches.append(IsogenyMatch(s, None, math.inf))
            continue
        t = optimize.brentq(g, _T_MIN, _T_MAX, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        sigma, _ = symmetric_functions(modular_parametrization(t))
        expected = big_j1 + big_j2
        matches.append(IsogenyMatch(s, float(t), abs(float(sigma) - expected) / abs(expected)))
    report = IsogenyReport(tau=tau, j1=j1, j2=j2, hauptmodul=hauptmodul_t(tau), matches=matches)
    logger.info(
        f"[PF] isogeny at tau={tau}: passing scalings {report.passing_scalings}, "
        f"t={[m.t for m in matches]}, Hauptmodul t={report.hauptmodul:.12g}"
    )
    return report
