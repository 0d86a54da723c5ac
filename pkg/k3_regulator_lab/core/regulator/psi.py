"""
psi.py
=========================
Real regulator integrals of the I1-supported cycle.

Features
--------
- ``psi``: psi(alpha) and eta(alpha) on the diagonal, integrated in one
  complex pass over the sphere
- ``regulator_pairing``: the same pairing at a general (alpha, beta)
- ``psi_at_one``: the convergent alpha = 1 integral I(1); lim psi = -16 I(1)
- ``psi_substituted``: alpha0 substituted into the reduced density
- ``limit_check``: I(1), the upper-half-plane check and the psi trend
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.numerics.cubature import integrate_sphere
from k3_regulator_lab.core.numerics.types import QuadratureResult
from k3_regulator_lab.core.regulator.density import (
    RegulatorDensity,
    density_at_one,
    density_at_two,
    limit_registry,
)
from k3_regulator_lab.core.regulator.periods import lattice_area

EXCLUDED_ALPHAS = (0.0, 1.0, -1.0, 2.0)
NEAR_EXCLUDED = 1e-3
_EXCLUDED_TOL = 1e-12


@dataclass(frozen=True)
class PsiResult:
    """
    psi and eta at one parameter point.

    ``psi_normalized`` is psi divided by the lattice area of E_alpha; it is
    None off the real axis.
    """

    alpha: complex
    psi: float
    eta: float
    psi_normalized: float | None
    err_abs: float
    evals: int
    converged: bool = True
    beta: complex | None = None
    near_excluded: bool = False

    def as_row(self) -> dict[str, Any]:
        alpha = complex(self.alpha)
        return {
            "alpha": alpha.real if alpha.imag == 0 else str(alpha),
            "psi": self.psi,
            "eta": self.eta,
            "psi_normalized": self.psi_normalized,
            "err_abs": self.err_abs,
            "evals": self.evals,
        }


def _check_alpha(alpha: complex) -> complex:
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise DomainError(f"alpha must be finite, got {alpha}")
    for bad in EXCLUDED_ALPHAS:
        distance = abs(alpha - bad)
        if distance <= _EXCLUDED_TOL:
            logger.error(f"[Psi] alpha={alpha} is an excluded point")
            raise DomainError(f"psi is undefined at alpha={bad:g}")
        if distance < NEAR_EXCLUDED:
            logger.warning(
                f"[Psi] alpha={alpha} lies within {distance:.1e} of {bad:g}; "
                "error estimates will be large"
            )
    return alpha


def error_inflation(alpha: complex) -> float:
    """NEAR_EXCLUDED / distance to the nearest excluded alpha, at least 1."""
    distance = min(abs(complex(alpha) - bad) for bad in EXCLUDED_ALPHAS)
    return max(1.0, NEAR_EXCLUDED / max(distance, _EXCLUDED_TOL))


def _normalized(alpha: complex, value: float) -> float | None:
    if alpha.imag != 0.0:
        return None
    return value / lattice_area(alpha.real)


def _pair(density: RegulatorDensity, tol: float, half: str | None = None) -> QuadratureResult:
    return integrate_sphere(
        density.pairing_integrand,
        density.registry,
        tol,
        half=half,
        complex_valued=True,
        n_jobs=settings.n_jobs,
    )


def psi(alpha: complex, tol: float = 1e-6, *, use_general: bool = False) -> PsiResult:
    """
    psi(alpha) = int log|(gamma + i)/(gamma - i)| Re(i*omega) and eta(alpha) likewise.

    Parameters
    ----------
    alpha : complex
        Diagonal parameter, not in {0, 1, -1, 2}.
    tol : float
        Relative tolerance of the sphere integral.
    use_general : bool
        Integrate the general-(alpha, beta) density at beta = alpha instead of
        the simplified diagonal one.

    Raises
    ------
    DomainError
        For alpha in the excluded set.

    Notes
    -----
    Within ``NEAR_EXCLUDED`` of an excluded point the quadrature error is
    scaled by ``error_inflation(alpha)`` and ``near_excluded`` is set.
    """
    alpha = _check_alpha(alpha)
    if use_general:
        density = RegulatorDensity.general(KummerModuli.diagonal(alpha))
    else:
        density = RegulatorDensity.diagonal(alpha)
    result = _pair(density, tol)
    value = complex(result.value)
    inflation = error_inflation(alpha)
    out = PsiResult(
        alpha=alpha,
        psi=value.real,
        eta=value.imag,
        psi_normalized=_normalized(alpha, value.real),
        err_abs=result.err_abs * inflation,
        evals=result.evals,
        converged=result.converged,
        near_excluded=inflation > 1.0,
    )
    logger.info(
        f"[Psi] alpha={alpha}: psi={out.psi:.12g}, eta={out.eta:.3e}, "
        f"err={out.err_abs:.2e}, evals={out.evals}"
    )
    return out


def regulator_pairing(m: KummerModuli, tol: float = 1e-6) -> PsiResult:
    """
    Pairing of log|zeta| with the pulled-back current at a general (alpha, beta).

    The real part is the psi-type integral, the imaginary part the eta-type one.
    ``m.sqrt_delta_sign`` selects the branch of log|zeta|.
    """
    m.require_cycle_valid()
    result = _pair(RegulatorDensity.general(m), tol)
    value = complex(result.value)
    logger.info(f"[Psi] pairing at alpha={m.alpha}, beta={m.beta}: {value} ± {result.err_abs:.2e}")
    return PsiResult(
        alpha=m.alpha,
        psi=value.real,
        eta=value.imag,
        psi_normalized=None,
        err_abs=result.err_abs,
        evals=result.evals,
        converged=result.converged,
        beta=m.beta,
    )


def _log_zeta_i(gamma: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(np.abs(gamma + 1j)) - np.log(np.abs(gamma - 1j))


def _i_one_integrand(gamma: Any) -> Any:
    gamma = np.asarray(gamma, dtype=complex)
    g = gamma * gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        return _log_zeta_i(gamma) * gamma.imag / (np.abs(g - 1.0) ** 2 * np.abs(g + 1.0))


def psi_at_one(tol: float = 1e-8, half: str | None = None) -> QuadratureResult:
    """
    I(1) = int log|(gamma + i)/(gamma - i)| r sin(theta) dx dy / (|gamma^2 - 1|^2 |gamma^2 + 1|).

    The integrand is even under gamma -> -gamma, so the ``half="upper"``
    integral is half of the full one.
    """
    result = integrate_sphere(
        _i_one_integrand, limit_registry(1.0), tol, half=half, n_jobs=settings.n_jobs
    )
    logger.info(f"[Psi] I(1){' (upper half)' if half else ''} = {result.value:.12g} ± {result.err_abs:.2e}")
    return result


def psi_substituted(alpha0: float, tol: float = 1e-6) -> PsiResult:
    """
    psi with alpha0 substituted into the diagonal density after cancellation.

    alpha0 = 1 reproduces -16 I(1). alpha0 = 2 is a convergent integral that
    is not the limit of psi, since psi diverges logarithmically there.
    """
    if alpha0 == 1.0:
        coefficient = density_at_one
    elif alpha0 == 2.0:
        coefficient = density_at_two
    else:
        raise DomainError(f"psi_substituted is defined for alpha0 in {{1, 2}}, got {alpha0}")
    density = RegulatorDensity(coefficient, limit_registry(alpha0), 1j, f"substituted({alpha0:g})")
    result = _pair(density, tol)
    value = complex(result.value)
    logger.info(f"[Psi] substituted alpha0={alpha0:g}: psi={value.real:.12g} ± {result.err_abs:.2e}")
    return PsiResult(
        alpha=complex(alpha0),
        psi=value.real,
        eta=value.imag,
        psi_normalized=None,
        err_abs=result.err_abs,
        evals=result.evals,
        converged=result.converged,
    )


@dataclass(frozen=True)
class LimitCheckReport:
    i_one: float
    i_one_err: float
    i_one_upper: float
    half_plane_rel_err: float
    target: float
    trend: list[PsiResult] = field(default_factory=list)
    substituted_at_two: float | None = None

    @property
    def gaps(self) -> list[float]:
        return [abs(r.psi - self.target) / abs(self.target) for r in self.trend]

    @property
    def positive(self) -> bool:
        return self.i_one > 0.0

    @property
    def trend_monotone(self) -> bool:
        gaps = self.gaps
        return all(b < a for a, b in zip(gaps, gaps[1:]))

    @property
    def within_five_percent(self) -> bool:
        return bool(self.gaps) and self.gaps[-1] < 0.05

    @property
    def passed(self) -> bool:
        return self.positive and self.half_plane_rel_err < 1e-6 and self.within_five_percent


def limit_check(
    tol: float = 1e-6,
    alphas: Sequence[float] = (0.9, 0.95, 0.99),
    *,
    include_two: bool = False,
) -> LimitCheckReport:
    """
    Evidence that psi(alpha) -> -16 I(1) as alpha -> 1.

    I(1) and its upper-half-plane counterpart are computed at a tolerance
    tight enough for a 1e-6 relative comparison between them.
    """
    inner_tol = min(tol, 1e-9)
    full = psi_at_one(inner_tol)
    upper = psi_at_one(inner_tol, half="upper")
    i_one = float(full.value)
    rel = abs(i_one - 2.0 * float(upper.value)) / abs(i_one)
    target = -16.0 * i_one
    trend = [psi(a, tol) for a in alphas]
    at_two = psi_substituted(2.0, tol).psi if include_two else None
    report = LimitCheckReport(
        i_one=i_one,
        i_one_err=full.err_abs,
        i_one_upper=float(upper.value),
        half_plane_rel_err=rel,
        target=target,
        trend=trend,
        substituted_at_two=at_two,
    )
    logger.info(
        f"[Psi] limit check: I(1)={i_one:.10g}, -16 I(1)={target:.10g}, "
        f"gaps={[f'{g:.2%}' for g in report.gaps]}, passed={report.passed}"
    )
    return report
