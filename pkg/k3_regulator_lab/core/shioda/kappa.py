"""
kappa.py
=========================
The transcendental regulator constant kappa of the rank-20 surface.

kappa = int_1^inf N(theta) dtheta / int_1^inf D(theta) dtheta with

    N(theta) = int_{r+}^{0} dw / sqrt(-w Q_theta(w))
    D(theta) = int_{r-}^{r+} dw / sqrt(w Q_theta(w))

Features
--------
- Inner integrals by sqrt-endpoint quadrature: N in w with exact endpoint
  complements, D after w = -e^u, where it reads int_{-L}^{L} du / sqrt(2(cosh L - cosh u))
  with cosh L = P(theta)
- AGM closed forms of both inner integrals as a cross-check and for
  extended precision
- Outer integral split as theta = 1 + eps (eps in [0, 1]) and theta = 1/s
  (s in [0, 1/2]); every parameter enters through P - 1, so nothing cancels
  near the double root at theta = 1
- Secondary strategy: truncation at T plus extrapolation of the tail
- Continued-fraction report across two precisions
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import mpmath
import numpy as np
from joblib import Parallel, delayed

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.exceptions import ConvergenceError, DomainError
from k3_regulator_lab.core.numerics.continued_fraction import (
    ContinuedFraction,
    common_prefix,
    continued_fraction,
)
from k3_regulator_lab.core.numerics.elliptic import agm
from k3_regulator_lab.core.numerics.quadrature import integrate_1d
from k3_regulator_lab.core.numerics.types import (
    PrecisionMode,
    QuadratureResult,
    SingularityKind,
    SingularityRegistry,
)

TRUNCATION_GRID = (200.0, 400.0, 800.0, 1600.0, 3200.0)
CF_DISCLAIMER = (
    "Continued-fraction terms of a numerically computed kappa are a rationality hint only; "
    "stable terms prove nothing about irrationality."
)
# below this s the theta = 1/s integrand contributes less than 1e-40
_S_FLOOR = 1e-80


@dataclass(frozen=True)
class ThetaGeometry:
    """P, P - 1, the roots of Q_theta, their gap and L = arccosh P."""

    p: float
    excess: float
    r_minus: float
    r_plus: float
    gap: float
    L: float

    @classmethod
    def from_excess(cls, excess: float) -> "ThetaGeometry":
        if excess < 0.0:
            raise DomainError(f"theta must be >= 1 (P - 1 = {excess})")
        p = 1.0 + excess
        half_gap = math.sqrt(excess) * math.sqrt(excess + 2.0)
        r_minus = -(p + half_gap)
        return cls(p, excess, r_minus, 1.0 / r_minus, 2.0 * half_gap, math.log1p(excess + half_gap))

    @classmethod
    def at_eps(cls, eps: float) -> "ThetaGeometry":
        """theta = 1 + eps."""
        return cls.from_excess(9.0 * eps + 12.0 * eps * eps + 4.0 * eps**3)

    @classmethod
    def at_theta(cls, theta: float) -> "ThetaGeometry":
        if theta < 1.0:
            raise DomainError(f"kappa inner integrals need theta >= 1, got {theta}")
        return cls.at_eps(theta - 1.0) if theta < 2.0 else cls.from_excess(4.0 * theta**3 - 3.0 * theta - 1.0)

    @classmethod
    def at_s(cls, s: float) -> "ThetaGeometry":
        """theta = 1/s."""
        return cls.from_excess((4.0 - 3.0 * s * s) / s**3 - 1.0)


def _geometry(theta: float | None, eps: float | None) -> ThetaGeometry:
    if eps is not None:
        return ThetaGeometry.at_eps(float(eps))
    if theta is None:
        raise DomainError("give theta or eps")
    return ThetaGeometry.at_theta(float(theta))


def inner_numerator(
    theta: float | None = None,
    *,
    eps: float | None = None,
    rel_tol: float = 1e-12,
    geometry: ThetaGeometry | None = None,
) -> QuadratureResult:
    """
    N(theta) = int_{r+}^{0} dw / sqrt(-w (w - r+)(w - r-)).

    r- lies just below the interval near theta = 1; it grades the mesh.
    """
    g = geometry or _geometry(theta, eps)
    if g.gap == 0.0:
        raise DomainError("the numerator inner integral diverges at theta = 1")
    gap = g.gap

    def f(w: np.ndarray, from_r_plus: np.ndarray, to_zero: np.ndarray) -> np.ndarray:
        return 1.0 / np.sqrt(to_zero * from_r_plus * (from_r_plus + gap))

    registry = SingularityRegistry.of([complex(g.r_minus)], SingularityKind.SQRT_ENDPOINT)
    return integrate_1d(f, (g.r_plus, 0.0), registry, rel_tol, with_complements=True)


def inner_denominator(
    theta: float | None = None,
    *,
    eps: float | None = None,
    fold: bool = False,
    rel_tol: float = 1e-12,
    geometry: ThetaGeometry | None = None,
) -> QuadratureResult:
    """
    D(theta) = int_{r-}^{r+} dw / sqrt(w Q_theta(w)).

    With w = -e^u the integrand becomes du / sqrt(2(cosh L - cosh u)) on (-L, L),
    written as 1 / (2 sqrt(sinh((L + u)/2) sinh((L - u)/2))). It is even in u,
    which is the w -> 1/w symmetry; ``fold=True`` integrates over (0, L) only
    (w in [-1, r+]) and doubles.
    """
    g = geometry or _geometry(theta, eps)
    L = g.L
    if L == 0.0:
        return QuadratureResult(value=math.pi, err_abs=0.0, evals=0, converged=True)
    if fold:

        def f_fold(u: np.ndarray, from_zero: np.ndarray, to_l: np.ndarray) -> np.ndarray:
            return 1.0 / np.sqrt(np.sinh(0.5 * (L + from_zero)) * np.sinh(0.5 * to_l))

        half = integrate_1d(f_fold, (0.0, L), None, rel_tol, with_complements=True)
        # 2 * (1/2) * int: the factor 2 of the fold cancels the 1/2 of the integrand
        return half

    def f(u: np.ndarray, from_minus_l: np.ndarray, to_l: np.ndarray) -> np.ndarray:
        return 0.5 / np.sqrt(np.sinh(0.5 * from_minus_l) * np.sinh(0.5 * to_l))

    return integrate_1d(f, (-L, L), None, rel_tol, with_complements=True)


def inner_closed_form(theta: float | None = None, *, eps: float | None = None) -> tuple[float, float]:
    """
    (N, D) from the half-periods of w (w - r+)(w - r-):
    N = pi / agm(sqrt(-r-), sqrt(r+ - r-)), D = pi / agm(sqrt(-r-), sqrt(-r+)).
    """
    g = _geometry(theta, eps)
    big = math.sqrt(-g.r_minus)
    den = math.pi / agm(big, math.sqrt(-g.r_plus))
    if g.gap == 0.0:
        return math.inf, den
    return math.pi / agm(big, math.sqrt(g.gap)), den


# ---------------------------------------------------------------------------
# Outer integrals
# ---------------------------------------------------------------------------


def _inner_values(
    kind: str,
    geometries: Sequence[ThetaGeometry],
    inner_tol: float,
    inner: str,
) -> list[float]:
    def one(g: ThetaGeometry) -> float:
        if inner == "closed_form":
            big = math.sqrt(-g.r_minus)
            other = math.sqrt(g.gap) if kind == "numerator" else math.sqrt(-g.r_plus)
            return math.pi / agm(big, other)
        if kind == "numerator":
            return float(inner_numerator(geometry=g, rel_tol=inner_tol).value)
        return float(inner_denominator(geometry=g, rel_tol=inner_tol).value)

    return Parallel(n_jobs=settings.n_jobs, prefer="threads")(delayed(one)(g) for g in geometries)


def _outer_double(kind: str, rel_tol: float, inner: str) -> QuadratureResult:
    inner_tol = max(1e-13, 1e-3 * rel_tol)

    def near(eps: np.ndarray) -> np.ndarray:
        flat = np.ravel(eps)
        values = _inner_values(kind, [ThetaGeometry.at_eps(float(e)) for e in flat], inner_tol, inner)
        return np.asarray(values).reshape(np.shape(eps))

    def far(s: np.ndarray) -> np.ndarray:
        flat = np.ravel(s)
        keep = [float(x) for x in flat if x > _S_FLOOR]
        values = iter(_inner_values(kind, [ThetaGeometry.at_s(x) for x in keep], inner_tol, inner))
        out = np.array([next(values) / (x * x) if x > _S_FLOOR else 0.0 for x in flat])
        return out.reshape(np.shape(s))

    head = integrate_1d(near, (0.0, 1.0), None, rel_tol)
    tail = integrate_1d(far, (0.0, 0.5), None, rel_tol)
    return QuadratureResult.combine([head, tail])


def _outer_extended(kind: str, rel_tol: float, dps: int) -> QuadratureResult:
    def inner_mp(excess: Any) -> Any:
        half_gap = mpmath.sqrt(excess * (excess + 2))
        r_minus = -(1 + excess + half_gap)
        big = mpmath.sqrt(-r_minus)
        if kind == "numerator":
            return mpmath.pi / mpmath.agm(big, mpmath.sqrt(2 * half_gap))
        return mpmath.pi / mpmath.agm(big, mpmath.sqrt(-1 / r_minus))

    def near(eps: Any) -> Any:
        return inner_mp(9 * eps + 12 * eps**2 + 4 * eps**3)

    def far(s: Any) -> Any:
        return inner_mp((4 - 3 * s**2) / s**3 - 1) / s**2

    head = integrate_1d(near, (0, 1), None, rel_tol, precision=PrecisionMode.EXTENDED, dps=dps)
    tail = integrate_1d(
        far, (0, mpmath.mpf(1) / 2), None, rel_tol, precision=PrecisionMode.EXTENDED, dps=dps
    )
    with mpmath.workdps(dps):
        value = head.value + tail.value
    return QuadratureResult(
        value=value,
        err_abs=head.err_abs + tail.err_abs,
        evals=head.evals + tail.evals,
        converged=head.converged and tail.converged,
    )


@dataclass(frozen=True)
class KappaResult:
    """
    kappa = numerator / denominator with error estimates.

    In extended precision ``numerator``, ``denominator`` and ``kappa`` are
    mpmath numbers carrying ``dps`` digits.
    """

    numerator: Any
    denominator: Any
    kappa: Any
    err_numerator: float
    err_denominator: float
    err_kappa: float
    precision: PrecisionMode
    dps: int | None = None
    strategy: str = "tail-substitution"
    evals: int = 0
    converged: bool = True
    cf_terms: tuple[int, ...] = field(default_factory=tuple)

    @property
    def transcendental_period(self) -> Any:
        return transcendental_period(self)


def _assemble(
    num: QuadratureResult,
    den: QuadratureResult,
    precision: PrecisionMode,
    dps: int | None,
    strategy: str,
) -> KappaResult:
    if precision is PrecisionMode.EXTENDED:
        with mpmath.workdps(dps):
            kap = num.value / den.value
    else:
        kap = float(num.value) / float(den.value)
    if not kap > 0:
        logger.error(f"[Kappa] Non-positive kappa={kap}: numerator={num.value}, denominator={den.value}")
        raise ConvergenceError(f"kappa came out non-positive ({kap})")
    rel = num.err_abs / abs(float(num.value)) + den.err_abs / abs(float(den.value))
    return KappaResult(
        numerator=num.value,
        denominator=den.value,
        kappa=kap,
        err_numerator=num.err_abs,
        err_denominator=den.err_abs,
        err_kappa=rel * abs(float(kap)),
        precision=precision,
        dps=dps,
        strategy=strategy,
        evals=num.evals + den.evals,
        converged=num.converged and den.converged,
    )


def kappa(
    rel_tol: float = 1e-8,
    precision: PrecisionMode | str = PrecisionMode.DOUBLE,
    *,
    dps: int | None = None,
    inner: str = "quadrature",
) -> KappaResult:
    """
    kappa by the theta = 1 + eps / theta = 1/s split of the outer integral.

    Parameters
    ----------
    rel_tol : float
        Relative tolerance of both outer integrals.
    precision : PrecisionMode
        ``double`` (nested quadrature) or ``extended`` (closed-form inner
        integrals, ``mpmath.quad`` outside, ``dps`` digits).
    inner : {"quadrature", "closed_form"}
        Inner integrals in double precision.

    Raises
    ------
    ConvergenceError
        If an outer integral fails to converge or kappa is not positive.
    """
    mode = PrecisionMode(precision)
    if inner not in ("quadrature", "closed_form"):
        raise DomainError(f"unknown inner method {inner!r}")
    if mode is PrecisionMode.EXTENDED:
        dps = dps or settings.extended_dps
        num = _outer_extended("numerator", rel_tol, dps)
        den = _outer_extended("denominator", rel_tol, dps)
    else:
        dps = None
        num = _outer_double("numerator", rel_tol, inner)
        den = _outer_double("denominator", rel_tol, inner)
    result = _assemble(num, den, mode, dps, "tail-substitution")
    if not result.converged:
        logger.error(
            f"[Kappa] Outer integral not converged: num err={num.err_abs:.2e}, den err={den.err_abs:.2e}"
        )
        raise ConvergenceError(
            f"kappa tail integral did not converge (numerator err {num.err_abs:.2e}, "
            f"denominator err {den.err_abs:.2e})"
        )
    logger.success(
        f"[Kappa] kappa={mpmath.nstr(result.kappa, 20) if dps else repr(result.kappa)} "
        f"± {result.err_kappa:.2e} ({mode.value}, {result.evals} outer evals)"
    )
    return result


def _truncated_pieces(kind: str, grid: Sequence[float], rel_tol: float, inner: str) -> list[float]:
    """Cumulative int_1^T for every T in ``grid``."""
    inner_tol = max(1e-13, 1e-3 * rel_tol)

    def integrand(theta: np.ndarray) -> np.ndarray:
        flat = np.ravel(theta)
        values = _inner_values(kind, [ThetaGeometry.at_theta(float(t)) for t in flat], inner_tol, inner)
        return np.asarray(values).reshape(np.shape(theta))

    def near(eps: np.ndarray) -> np.ndarray:
        flat = np.ravel(eps)
        values = _inner_values(kind, [ThetaGeometry.at_eps(float(e)) for e in flat], inner_tol, inner)
        return np.asarray(values).reshape(np.shape(eps))

    total = [integrate_1d(near, (0.0, 1.0), None, rel_tol)]
    edges = [2.0, *grid]
    cumulative = []
    for lo, hi in zip(edges, edges[1:]):
        total.append(integrate_1d(integrand, (lo, hi), None, rel_tol))
        cumulative.append(math.fsum(float(r.value) for r in total))
    if not all(r.converged for r in total):
        raise ConvergenceError(f"truncated {kind} integral did not converge")
    return cumulative


def _extrapolate(grid: Sequence[float], values: Sequence[float]) -> float:
    t = np.asarray(grid, dtype=float)
    h = t ** -0.5
    basis = np.column_stack([np.ones_like(t), h, h * np.log(t), h**5, h**5 * np.log(t)])
    coeffs, *_ = np.linalg.lstsq(basis, np.asarray(values, dtype=float), rcond=None)
    return float(coeffs[0])


def kappa_truncated(
    grid: Sequence[float] = TRUNCATION_GRID,
    rel_tol: float = 1e-10,
    inner: str = "quadrature",
) -> KappaResult:
    """
    kappa from int_1^T at each T in ``grid``, extrapolated to T = inf with the tail
    model {1, T^-1/2, T^-1/2 log T, T^-5/2, T^-5/2 log T}.
    """
    if len(grid) < 5:
        raise DomainError("the tail model needs at least five truncation points")
    num = _extrapolate(grid, _truncated_pieces("numerator", grid, rel_tol, inner))
    den = _extrapolate(grid, _truncated_pieces("denominator", grid, rel_tol, inner))
    kap = num / den
    logger.info(f"[Kappa] truncation strategy: kappa={kap!r} (T up to {max(grid):g})")
    return KappaResult(
        numerator=num,
        denominator=den,
        kappa=kap,
        err_numerator=math.nan,
        err_denominator=math.nan,
        err_kappa=math.nan,
        precision=PrecisionMode.DOUBLE,
        strategy="truncation",
    )


@dataclass(frozen=True)
class DualStrategyReport:
    substitution: KappaResult
    truncation: KappaResult

    @property
    def rel_diff(self) -> float:
        a, b = float(self.substitution.kappa), float(self.truncation.kappa)
        return abs(a - b) / abs(a)

    @property
    def passed(self) -> bool:
        return self.rel_diff < 1e-6


def kappa_dual_strategy_check(rel_tol: float = 1e-10, inner: str = "quadrature") -> DualStrategyReport:
    report = DualStrategyReport(kappa(rel_tol, inner=inner), kappa_truncated(rel_tol=rel_tol, inner=inner))
    logger.info(f"[Kappa] dual strategy: rel diff {report.rel_diff:.2e}, passed={report.passed}")
    return report


@dataclass(frozen=True)
class TailProfile:
    thetas: list[float]
    numerator: list[float]
    denominator: list[float]

    @property
    def numerator_slopes(self) -> list[float]:
        x, y = np.log(self.thetas), np.log(self.numerator)
        return [float(s) for s in np.diff(y) / np.diff(x)]

    @property
    def denominator_scaled(self) -> list[float]:
        """D(theta) theta^(3/2) / log theta; bounded when D = O(log theta / theta^(3/2))."""
        return [d * t**1.5 / math.log(t) for t, d in zip(self.thetas, self.denominator)]

    @property
    def consistent(self) -> bool:
        scaled = self.denominator_scaled
        return all(abs(s + 1.5) < 0.05 for s in self.numerator_slopes) and max(scaled) / min(scaled) < 2.0


def tail_decay_profile(thetas: Sequence[float] = (1e1, 1e2, 1e3, 1e4), rel_tol: float = 1e-12) -> TailProfile:
    """Inner integrals at large theta for the decay-rate check."""
    num = [float(inner_numerator(t, rel_tol=rel_tol).value) for t in thetas]
    den = [float(inner_denominator(t, rel_tol=rel_tol).value) for t in thetas]
    return TailProfile(list(map(float, thetas)), num, den)


def transcendental_period(result: KappaResult) -> Any:
    """int_gamma omega_0 = 2 sqrt(2) times the denominator integral."""
    if result.precision is PrecisionMode.EXTENDED:
        with mpmath.workdps(result.dps or settings.extended_dps):
            return 2 * mpmath.sqrt(2) * result.denominator
    return 2.0 * math.sqrt(2.0) * float(result.denominator)


@dataclass(frozen=True)
class CFReport:
    expansions: list[ContinuedFraction]
    stable_terms: tuple[int, ...]
    disclaimer: str = CF_DISCLAIMER

    @property
    def stable_count(self) -> int:
        return len(self.stable_terms)


def _expand(result: KappaResult, n_terms: int) -> ContinuedFraction:
    rel_err = result.err_kappa / abs(float(result.kappa)) if math.isfinite(result.err_kappa) else None
    if result.precision is PrecisionMode.EXTENDED:
        with mpmath.workdps(result.dps or settings.extended_dps):
            return continued_fraction(result.kappa, n_terms, rel_err=rel_err)
    return continued_fraction(float(result.kappa), n_terms, rel_err=rel_err)


def kappa_cf_report(results: Sequence[KappaResult], terms: int = 40) -> CFReport:
    """
    Continued-fraction terms of kappa that agree across all given precisions.
    """
    if len(results) < 2:
        raise DomainError("kappa_cf_report needs kappa at two precisions")
    expansions = [_expand(r, terms) for r in results]
    stable = common_prefix(*expansions)
    logger.info(f"[Kappa] {len(stable)} stable continued-fraction terms: {list(stable)}")
    logger.warning(f"[Kappa] {CF_DISCLAIMER}")
    return CFReport(expansions=expansions, stable_terms=stable)


def kappa_at_two_precisions(
    rel_tol: float,
    precision: PrecisionMode | str = PrecisionMode.DOUBLE,
    dps: int | None = None,
    evaluator: Callable[..., KappaResult] = kappa,
) -> tuple[KappaResult, KappaResult]:
    """kappa at the requested precision and at a doubled one (extended at twice the digits)."""
    mode = PrecisionMode(precision)
    digits = dps or settings.extended_dps
    if mode is PrecisionMode.EXTENDED:
        return (
            evaluator(rel_tol, PrecisionMode.EXTENDED, dps=digits),
            evaluator(rel_tol, PrecisionMode.EXTENDED, dps=2 * digits),
        )
    return evaluator(rel_tol, PrecisionMode.DOUBLE), evaluator(rel_tol, PrecisionMode.EXTENDED, dps=digits)
