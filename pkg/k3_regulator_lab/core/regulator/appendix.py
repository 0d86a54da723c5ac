"""
appendix.py
=========================
Numerical checks of the local estimates behind the alpha -> 1 limit and the
alpha -> 2 divergence.

Both integrals live in the local coordinate zeta near a point where poles
collide, with |dzeta ^ dzeta-bar| = 2 dx dy.

Features
--------
- ``appendix_bound_check``: the absolute integrand near alpha = 1 (log|z|
  replaced by its bound |zeta|) over |zeta| < eps, split into the main piece,
  four half-disks and two disks, against the 1000 pi eps budget
- ``estat2_value`` / ``estat2_divergence``: the alpha = 2 analogue and a
  C log(1/chi) + D fit showing it diverges
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.cubature import Disk, integrate_2d
from k3_regulator_lab.core.numerics.types import QuadratureResult, SingularityKind, SingularityRegistry

SQRT3 = math.sqrt(3.0)
MAIN_BOUND = 650.0
HALF_DISK_BOUND = 40.0 / 3.0
SIDE_DISK_BOUND = 250.0 / 3.0
TOTAL_BOUND = 1000.0
SLOPE_SPREAD = 0.15


def _bound_integrand(chi: float) -> Callable[[np.ndarray], np.ndarray]:
    c2 = chi * chi
    i3 = 1j * SQRT3 * chi

    def f(z: np.ndarray) -> np.ndarray:
        num = np.abs(z - 3 * chi) * np.abs(z + 3 * chi) * np.abs(z + chi) * np.abs(z - chi) * np.abs(z)
        den = (
            np.abs(z - (chi + c2))
            * np.abs(z - (chi - c2))
            * np.abs(z + (chi + c2))
            * np.abs(z + (chi - c2))
            * np.abs(z - i3)
            * np.abs(z + i3)
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2.0 * num / den

    return f


def _bound_registry(chi: float) -> SingularityRegistry:
    c2 = chi * chi
    poles = [chi + c2, chi - c2, -(chi + c2), -(chi - c2), 1j * SQRT3 * chi, -1j * SQRT3 * chi]
    return SingularityRegistry.of([complex(p) for p in poles], SingularityKind.INVERSE_MODULUS)


@dataclass(frozen=True)
class AppendixReport:
    """
    Pieces of the |zeta| < eps integral.

    ``half_disks`` are the two halves of D_{chi/2}(-chi) and of D_{chi/2}(chi);
    ``side_disks`` are D_{chi/2}(+-i sqrt(3) chi).
    """

    eps: float
    chi: float
    main: float
    half_disks: list[float]
    side_disks: list[float]
    err_abs: float
    converged: bool
    pieces: dict[str, float] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return math.fsum([self.main, *self.half_disks, *self.side_disks])

    @property
    def bound(self) -> float:
        return TOTAL_BOUND * math.pi * self.eps

    @property
    def piece_bounds(self) -> dict[str, float]:
        return {
            "main": MAIN_BOUND * math.pi * self.eps,
            "half_disk": HALF_DISK_BOUND * math.pi * self.eps,
            "side_disk": SIDE_DISK_BOUND * math.pi * self.eps,
        }

    @property
    def pieces_within_bounds(self) -> bool:
        b = self.piece_bounds
        return (
            self.main <= b["main"]
            and all(v <= b["half_disk"] for v in self.half_disks)
            and all(v <= b["side_disk"] for v in self.side_disks)
        )

    @property
    def passed(self) -> bool:
        return self.total <= self.bound


def appendix_bound_check(eps: float, chi: float, tol: float = 1e-6) -> AppendixReport:
    """
    Evaluate the absolute appendix integrand over |zeta| < eps by pieces.

    The main piece is the whole disk minus the six small pieces, all integrands
    being positive.

    Raises
    ------
    DomainError
        Unless 0 < chi < eps / 3 <= 1 / 6.
    """
    if not (0.0 < chi < eps / 3.0 and eps / 3.0 <= 1.0 / 6.0):
        logger.error(f"[Appendix] Parameter ordering violated: eps={eps}, chi={chi}")
        raise DomainError(f"need 0 < chi < eps/3 <= 1/6, got eps={eps}, chi={chi}")
    f = _bound_integrand(chi)
    registry = _bound_registry(chi)
    r = chi / 2.0
    regions = {
        "disk": Disk(0j, eps),
        "half(-chi, right)": Disk(complex(-chi), r, (-0.5 * math.pi, 0.5 * math.pi)),
        "half(-chi, left)": Disk(complex(-chi), r, (0.5 * math.pi, 1.5 * math.pi)),
        "half(+chi, right)": Disk(complex(chi), r, (-0.5 * math.pi, 0.5 * math.pi)),
        "half(+chi, left)": Disk(complex(chi), r, (0.5 * math.pi, 1.5 * math.pi)),
        "disk(+i sqrt3 chi)": Disk(1j * SQRT3 * chi, r),
        "disk(-i sqrt3 chi)": Disk(-1j * SQRT3 * chi, r),
    }
    names = list(regions)
    results: list[QuadratureResult] = Parallel(n_jobs=settings.n_jobs, prefer="threads")(
        delayed(integrate_2d)(f, regions[name], registry, tol) for name in names
    )
    values = {name: float(res.value) for name, res in zip(names, results)}
    half = [values[n] for n in names[1:5]]
    side = [values[n] for n in names[5:]]
    main = values["disk"] - math.fsum(half + side)
    report = AppendixReport(
        eps=eps,
        chi=chi,
        main=main,
        half_disks=half,
        side_disks=side,
        err_abs=math.fsum(res.err_abs for res in results),
        converged=all(res.converged for res in results),
        pieces=values,
    )
    logger.info(
        f"[Appendix] eps={eps}, chi={chi}: total={report.total:.6g} "
        f"(bound {report.bound:.6g}), main={main:.6g}, pieces ok={report.pieces_within_bounds}"
    )
    return report


def _estat2_integrand(chi: float) -> Callable[[np.ndarray], np.ndarray]:
    s = math.sqrt(chi)

    def f(z: np.ndarray) -> np.ndarray:
        num = np.abs(z + 3j * s) ** 2 * np.abs(z - 3j * s) ** 2
        den = np.abs(z) * np.abs(z + 3 * chi) * np.abs(z - 3 * chi) * np.abs(z - 3 * s) * np.abs(z + 3 * s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2.0 * num * np.log(np.abs(z)) / den

    return f


def estat2_value(chi: float, radius: float = 0.5, tol: float = 1e-7) -> QuadratureResult:
    """
    The alpha -> 2 local integral over |zeta| < radius for chi > 0.

    The integrand is negative (log|zeta| < 0 for radius < 1), so shrinking
    the radius shrinks |value|.
    """
    if not chi > 0.0:
        raise DomainError(f"estat2 needs chi > 0, got {chi}")
    s = math.sqrt(chi)
    registry = SingularityRegistry.of([0j], SingularityKind.LOGARITHMIC).extend(
        SingularityRegistry.of(
            [complex(3 * chi), complex(-3 * chi), complex(3 * s), complex(-3 * s)],
            SingularityKind.INVERSE_MODULUS,
        )
    )
    result = integrate_2d(_estat2_integrand(chi), Disk(0j, radius), registry, tol)
    logger.debug(
        f"[Appendix] estat2(chi={chi}, radius={radius}) = {result.value:.10g} ± {result.err_abs:.2e}"
    )
    return result


def estat2_limit(radius: float = 0.5) -> float:
    """The chi = 0 integrand integrated in closed form: 4 pi (R log R - R)."""
    return 4.0 * math.pi * (radius * math.log(radius) - radius)


@dataclass(frozen=True)
class LogDivergenceFit:
    """value ~ slope log(1/chi) + intercept."""

    chis: list[float]
    values: list[float]
    slope: float
    intercept: float
    decade_slopes: list[float]
    stable: bool


def fit_log_divergence(chis: Sequence[float], values: Sequence[float]) -> LogDivergenceFit:
    """
    Least-squares fit of ``values`` against log(1/chi).

    ``stable`` requires every consecutive-pair slope to agree with the fitted
    slope within 15%.
    """
    x = -np.log(np.asarray(chis, dtype=float))
    y = np.asarray(values, dtype=float)
    if x.size < 2 or x.shape != y.shape:
        raise DomainError("fit_log_divergence needs at least two paired samples")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    decade = [float(v) for v in np.diff(y) / np.diff(x)]
    stable = bool(slope != 0.0 and all(abs(d - slope) <= SLOPE_SPREAD * abs(slope) for d in decade))
    if not stable:
        logger.warning(f"[Appendix] Log-divergence fit unstable: slope={slope:.6g}, pair slopes={decade}")
    return LogDivergenceFit(
        chis=[float(c) for c in chis],
        values=[float(v) for v in y],
        slope=float(slope),
        intercept=float(intercept),
        decade_slopes=decade,
        stable=stable,
    )


def estat2_divergence(
    chis: Sequence[float] = (1e-2, 1e-3, 1e-4),
    tol: float = 1e-7,
    evaluator: Callable[[float, float], float] | None = None,
) -> LogDivergenceFit:
    """
    Evaluate the alpha -> 2 local integral along ``chis`` and fit C log(1/chi) + D.

    ``evaluator(chi, tol)`` replaces the built-in integral (used to check the
    fit on integrals with a known divergence).
    """
    if evaluator is None:

        def evaluator(chi: float, rel_tol: float) -> float:
            return float(estat2_value(chi, tol=rel_tol).value)

    values = [evaluator(c, tol) for c in chis]
    fit = fit_log_divergence(chis, values)
    logger.info(
        f"[Appendix] estat2 divergence: C={fit.slope:.6g}, D={fit.intercept:.6g}, stable={fit.stable} "
        f"(chi -> 0 integrand gives {estat2_limit():.6g})"
    )
    return fit
