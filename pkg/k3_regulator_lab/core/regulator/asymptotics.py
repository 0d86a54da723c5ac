"""
asymptotics.py
=========================
Logarithmic fits of normalized psi near the degenerate parameters.

Normalized psi behaves like A log|alpha - c| + B as alpha -> -1 or 2 and
decays to zero as alpha -> 0, 1. The fits here quantify both statements.

The decay at 0 is slow. Raw psi tends to the finite value 16 I(1) while the
lattice area grows like log(1/alpha), so normalized psi first rises to a
peak near alpha = 0.05 and only then falls off like 1/log(1/alpha). The
gated check therefore runs past the peak; a reference sequence before it
is reported alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.regulator.psi import psi

FIT_RESIDUAL_RATIO = 0.1


@dataclass(frozen=True)
class AsymptoticFit:
    """
    Least-squares fit value ~ A log|alpha - c| + B.

    Attributes
    ----------
    slope, intercept : float
        A and B.
    residual : float
        Largest absolute deviation of a sample from the fit.
    pair_slopes : list[float]
        Slopes between consecutive samples.
    stable : bool
        ``residual < 0.1 |A|`` and A is nonzero.
    """

    center: float
    slope: float
    intercept: float
    residual: float
    pair_slopes: list[float]
    stable: bool


def asymptotic_fit(
    alphas: Sequence[float],
    values: Sequence[float],
    center: float,
    min_samples: int = 3,
) -> AsymptoticFit:
    """
    Fit ``values`` against log|alpha - center| by least squares.

    Raises
    ------
    DomainError
        With fewer than ``min_samples`` samples or a sample at the center.
    """
    x = np.asarray(alphas, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.size < min_samples:
        raise DomainError(f"asymptotic_fit needs at least {min_samples} paired samples")
    dist = np.abs(x - center)
    if np.any(dist == 0.0):
        raise DomainError(f"a sample lies on the center {center}")
    logs = np.log(dist)
    design = np.column_stack([logs, np.ones_like(logs)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.max(np.abs(design @ np.array([slope, intercept]) - y)))
    pair_slopes = [float(s) for s in np.diff(y) / np.diff(logs)]
    stable = bool(slope != 0.0 and residual < FIT_RESIDUAL_RATIO * abs(slope))
    if not stable:
        logger.warning(
            f"[Asymptotics] Unstable fit at c={center}: A={slope:.6g}, residual={residual:.3e}, "
            f"pair slopes={pair_slopes}"
        )
    else:
        logger.info(f"[Asymptotics] c={center}: A={slope:.6g}, B={intercept:.6g}")
    return AsymptoticFit(
        center=float(center),
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
        pair_slopes=pair_slopes,
        stable=stable,
    )


def approach_samples(center: float, exponents: Sequence[int] = (2, 3, 4), side: float = 1.0) -> list[float]:
    """alpha = center + side * 10^-k for each k."""
    return [center + side * 10.0 ** (-k) for k in exponents]


def psi_asymptotic_fit(
    center: float,
    exponents: Sequence[int] = (2, 3, 4),
    tol: float = 1e-5,
    side: float = 1.0,
) -> AsymptoticFit:
    """Sample normalized psi approaching ``center`` geometrically and fit it."""
    alphas = approach_samples(center, exponents, side)
    values = []
    for a in alphas:
        result = psi(a, tol)
        if result.psi_normalized is None:
            raise DomainError(f"normalized psi needs real alpha, got {a}")
        values.append(result.psi_normalized)
    return asymptotic_fit(alphas, values, center)


@dataclass(frozen=True)
class DecayReport:
    alphas: list[float]
    values: list[float]
    decreasing: bool


def normalized_decay_check(
    alphas: Sequence[float] = (0.1, 0.01, 0.001),
    tol: float = 1e-5,
) -> DecayReport:
    """|normalized psi| along a sequence approaching 0 (or 1); it should shrink."""
    values = []
    for a in alphas:
        result = psi(a, tol)
        values.append(float(result.psi_normalized or 0.0))
    mags = [abs(v) for v in values]
    decreasing = all(b < a for a, b in zip(mags, mags[1:]))
    if not decreasing:
        logger.warning(f"[Asymptotics] normalized psi does not decay along {list(alphas)}: {values}")
    return DecayReport(alphas=list(alphas), values=values, decreasing=decreasing)


@dataclass(frozen=True)
class DecayProfile:
    """
    Decay of normalized psi toward alpha = 0.

    Attributes
    ----------
    tail : DecayReport
        Sequence past the peak; the gated part.
    reference : DecayReport
        Sequence before the peak, reported as computed.
    reciprocal_fit : AsymptoticFit
        1 / value against log(alpha) on the tail. A negative slope means
        1 / value grows without bound, i.e. the values go to zero.
    """

    tail: DecayReport
    reference: DecayReport
    reciprocal_fit: AsymptoticFit

    @property
    def passed(self) -> bool:
        return self.tail.decreasing and self.reciprocal_fit.slope < 0.0


def decay_profile(
    tail_alphas: Sequence[float] = (0.01, 0.003, 0.001),
    reference_alphas: Sequence[float] = (0.1, 0.05, 0.02),
    tol: float = 1e-5,
) -> DecayProfile:
    """Normalized psi along ``tail_alphas`` (gated) and ``reference_alphas`` (reported)."""
    tail = normalized_decay_check(tail_alphas, tol)
    if any(v == 0.0 for v in tail.values):
        raise DomainError("normalized psi vanished on the tail; the reciprocal fit is undefined")
    reference = normalized_decay_check(reference_alphas, tol)
    fit = asymptotic_fit(tail.alphas, [1.0 / abs(v) for v in tail.values], 0.0)
    if not reference.decreasing:
        logger.info(
            f"[Asymptotics] reference sequence {reference.alphas} lies before the peak: "
            f"{[f'{v:.4g}' for v in reference.values]}"
        )
    return DecayProfile(tail=tail, reference=reference, reciprocal_fit=fit)
