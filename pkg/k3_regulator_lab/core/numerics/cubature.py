"""
cubature.py
=========================
Adaptive two-dimensional cubature for densities with integrable point
singularities, and its Riemann-sphere wrapper.

Features
--------
- Rectangles and (sectors of) disks; disks are integrated in polar
  parameters so the polar Jacobian absorbs a singularity at the center
- Global adaptive quadtree driven by a max-heap of cell error estimates
- Regular cells: tensor Gauss-Legendre at two orders, the difference is the
  error estimate
- Cells holding one registered point: split into triangles with apex at the
  point, Duffy-mapped, double exponential rule in the radial variable
- Deterministic reduction (``math.fsum``) independent of evaluation order
- Sphere integrals as the sum of two unit-disk charts (gamma and w = 1/gamma),
  evaluated concurrently with joblib
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.config.settings import settings
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.numerics.types import (
    INFINITY,
    QuadratureResult,
    SingularityKind,
    SingularityRegistry,
    SpherePoint,
    is_infinite,
)

Density = Callable[[np.ndarray], np.ndarray]

_GL_HI = 8
_GL_LO = 6
_DE_T_MAX = 3.2
_DE_H_HI = 0.2
_DE_H_LO = 0.4
_BATCH = 32
_POINT_TOL = 1e-12
# errors below this fraction of the integral of |f| count as converged
MASS_FLOOR = 1e-12


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float


@dataclass(frozen=True)
class Disk:
    center: complex = 0j
    radius: float = 1.0
    theta_span: tuple[float, float] = (0.0, 2.0 * math.pi)


# ---------------------------------------------------------------------------
# Rules on the unit square
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _double_exponential(h: float) -> tuple[np.ndarray, np.ndarray]:
    """tanh-sinh nodes on [0, 1] computed from the small end."""
    n = int(round(_DE_T_MAX / h))
    t = h * np.arange(-n, n + 1, dtype=float)
    u = 0.5 * math.pi * np.sinh(t)
    x = 1.0 / (1.0 + np.exp(-2.0 * u))
    w = h * 0.25 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return x, w


@lru_cache(maxsize=None)
def _tensor(kind_u: str, kind_v: str, hi: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    def rule(kind: str) -> tuple[np.ndarray, np.ndarray]:
        if kind == "gl":
            return _gauss(_GL_HI if hi else _GL_LO)
        return _double_exponential(_DE_H_HI if hi else _DE_H_LO)

    xu, wu = rule(kind_u)
    xv, wv = rule(kind_v)
    uu, vv = np.meshgrid(xu, xv, indexing="ij")
    ww = np.outer(wu, wv)
    return uu.ravel(), vv.ravel(), ww.ravel()


# ---------------------------------------------------------------------------
# Parameter maps
# ---------------------------------------------------------------------------


@dataclass
class _ParamDomain:
    """Integrand pulled back to a parameter rectangle [u0,u1] x [v0,v1]."""

    g: Callable[[np.ndarray, np.ndarray], np.ndarray]
    u0: float
    u1: float
    v0: float
    v1: float
    points: list[tuple[float, float]] = field(default_factory=list)
    radial_edge: bool = False
    grid: tuple[int, int] = (4, 4)


def _rectangle_domain(f: Density, region: Rectangle, registry: SingularityRegistry) -> _ParamDomain:
    def g(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return f(u + 1j * v)

    dom = _ParamDomain(g, region.x0, region.x1, region.y0, region.y1)
    scale = max(region.x1 - region.x0, region.y1 - region.y0)
    for loc in registry.locations():
        if is_infinite(loc):
            continue
        z = complex(loc)
        tol = _POINT_TOL * scale
        if region.x0 - tol <= z.real <= region.x1 + tol and region.y0 - tol <= z.imag <= region.y1 + tol:
            dom.points.append(
                (min(max(z.real, region.x0), region.x1), min(max(z.imag, region.y0), region.y1))
            )
    return dom


def _disk_domain(f: Density, region: Disk, registry: SingularityRegistry) -> _ParamDomain:
    c = complex(region.center)
    radius = float(region.radius)
    t0, t1 = region.theta_span
    if radius <= 0.0 or not t1 > t0 or t1 - t0 > 2.0 * math.pi + 1e-12:
        raise DomainError(f"invalid disk region {region}")
    full = abs((t1 - t0) - 2.0 * math.pi) <= 1e-12

    def g(r: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return f(c + r * np.exp(1j * theta)) * r

    n_theta = max(2, int(math.ceil(8.0 * (t1 - t0) / (2.0 * math.pi))))
    dom = _ParamDomain(g, 0.0, radius, t0, t1, grid=(2, n_theta))
    ang_tol = 1e-12
    for loc in registry.locations():
        if is_infinite(loc):
            continue
        offset = complex(loc) - c
        rho = abs(offset)
        if rho <= _POINT_TOL * radius:
            dom.radial_edge = True
            continue
        if rho > radius * (1.0 + _POINT_TOL):
            continue
        rho = min(rho, radius)
        phi = t0 + math.fmod(math.atan2(offset.imag, offset.real) - t0, 2.0 * math.pi)
        if phi < t0:
            phi += 2.0 * math.pi
        if phi > t0 + 2.0 * math.pi - ang_tol:
            phi = t0
        if full:
            dom.points.append((rho, phi))
            if phi - t0 <= ang_tol:
                dom.points.append((rho, t1))
        elif t0 - ang_tol <= phi <= t1 + ang_tol:
            dom.points.append((rho, min(max(phi, t0), t1)))
    return dom


# ---------------------------------------------------------------------------
# Adaptive driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Cell:
    u0: float
    u1: float
    v0: float
    v1: float
    points: tuple[int, ...]
    radial: bool

    def contains(self, p: tuple[float, float], tol: float) -> bool:
        return self.u0 - tol <= p[0] <= self.u1 + tol and self.v0 - tol <= p[1] <= self.v1 + tol

    def key(self) -> tuple[float, float, float, float]:
        return (self.u0, self.v0, self.u1, self.v1)


class _AdaptiveCubature:
    """Quadtree refinement of one parameter rectangle."""

    def __init__(self, dom: _ParamDomain, rel_tol: float, abs_tol: float, max_evals: int):
        self.dom = dom
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.max_evals = max_evals
        self.evals = 0
        span_u = dom.u1 - dom.u0
        span_v = dom.v1 - dom.v0
        self.tol_u = _POINT_TOL * span_u
        self.tol_v = _POINT_TOL * span_v
        self.min_width = 1e-13 * max(span_u, span_v)
        self.floor_scale = 1e-12 * max(span_u, span_v)

    # -- cell construction ---------------------------------------------------

    def _make_cell(self, u0: float, u1: float, v0: float, v1: float, candidates: Sequence[int]) -> _Cell:
        tol = max(self.tol_u, self.tol_v)
        bounds = _Cell(u0, u1, v0, v1, (), False)
        inside = tuple(i for i in candidates if bounds.contains(self.dom.points[i], tol))
        radial = self.dom.radial_edge and u0 <= self.dom.u0
        return _Cell(u0, u1, v0, v1, inside, radial)

    def _children(self, cell: _Cell) -> list[_Cell]:
        um = 0.5 * (cell.u0 + cell.u1)
        vm = 0.5 * (cell.v0 + cell.v1)
        return [
            self._make_cell(cell.u0, um, cell.v0, vm, cell.points),
            self._make_cell(um, cell.u1, cell.v0, vm, cell.points),
            self._make_cell(cell.u0, um, vm, cell.v1, cell.points),
            self._make_cell(um, cell.u1, vm, cell.v1, cell.points),
        ]

    def _splittable(self, cell: _Cell) -> bool:
        return min(cell.u1 - cell.u0, cell.v1 - cell.v0) > self.min_width

    def _needs_isolation(self, cell: _Cell) -> bool:
        crowded = len(cell.points) + (1 if cell.radial else 0) >= 2
        return crowded and self._splittable(cell)

    # -- rules -----------------------------------------------------------------

    def _tensor_nodes(self, cells: list[_Cell], kind_u: str, hi: bool):
        uu, vv, ww = _tensor(kind_u, "gl", hi)
        u0 = np.array([c.u0 for c in cells])[:, None]
        du = np.array([c.u1 - c.u0 for c in cells])[:, None]
        v0 = np.array([c.v0 for c in cells])[:, None]
        dv = np.array([c.v1 - c.v0 for c in cells])[:, None]
        u = u0 + du * uu[None, :]
        v = v0 + dv * vv[None, :]
        w = (du * dv) * ww[None, :]
        return u, v, w

    def _duffy_nodes(self, cell: _Cell, hi: bool):
        """Triangles with apex at the cell's registered point."""
        pu, pv = self.dom.points[cell.points[0]]
        pu = min(max(pu, cell.u0), cell.u1)
        pv = min(max(pv, cell.v0), cell.v1)
        corners = [(cell.u0, cell.v0), (cell.u1, cell.v0), (cell.u1, cell.v1), (cell.u0, cell.v1)]
        s_nodes, s_w = _double_exponential(_DE_H_HI if hi else _DE_H_LO)
        t_nodes, t_w = _gauss(_GL_HI if hi else _GL_LO)
        ss, tt = np.meshgrid(s_nodes, t_nodes, indexing="ij")
        ws = np.outer(s_w, t_w)
        ss, tt, ws = ss.ravel(), tt.ravel(), ws.ravel()
        area = (cell.u1 - cell.u0) * (cell.v1 - cell.v0)
        us, vs, weights = [], [], []
        for k in range(4):
            a = corners[k]
            b = corners[(k + 1) % 4]
            au, av = a[0] - pu, a[1] - pv
            bu, bv = b[0] - a[0], b[1] - a[1]
            det = abs(au * bv - av * bu)
            if det <= 1e-14 * area:
                continue
            du = au + tt * bu
            dv = av + tt * bv
            reach = np.hypot(du, dv)
            keep = ss * reach > self.floor_scale
            us.append((pu + ss * du)[keep])
            vs.append((pv + ss * dv)[keep])
            weights.append((ws * ss * det)[keep])
        return np.concatenate(us), np.concatenate(vs), np.concatenate(weights)

    def _evaluate(self, cells: list[_Cell]) -> tuple[np.ndarray, np.ndarray]:
        n = len(cells)
        values = np.zeros(n, dtype=complex)
        errors = np.zeros(n)
        groups: dict[str, list[int]] = {"gl": [], "de": [], "duffy": []}
        for i, cell in enumerate(cells):
            if cell.points:
                groups["duffy"].append(i)
            elif cell.radial:
                groups["de"].append(i)
            else:
                groups["gl"].append(i)

        for kind_u in ("gl", "de"):
            idx = groups[kind_u]
            if not idx:
                continue
            subset = [cells[i] for i in idx]
            estimates = []
            for hi in (True, False):
                u, v, w = self._tensor_nodes(subset, kind_u, hi)
                vals = np.asarray(self.dom.g(u.ravel(), v.ravel())).reshape(u.shape)
                self.evals += vals.size
                estimates.append(vals)
                estimates.append(w)
            hi_vals, hi_w, lo_vals, lo_w = estimates
            finite = np.all(np.isfinite(hi_vals), axis=1) & np.all(np.isfinite(lo_vals), axis=1)
            q_hi = np.sum(np.where(np.isfinite(hi_vals), hi_vals, 0.0) * hi_w, axis=1)
            q_lo = np.sum(np.where(np.isfinite(lo_vals), lo_vals, 0.0) * lo_w, axis=1)
            values[idx] = q_hi
            errors[idx] = np.where(finite, np.abs(q_hi - q_lo), np.inf)

        for i in groups["duffy"]:
            q = []
            finite = True
            for hi in (True, False):
                u, v, w = self._duffy_nodes(cells[i], hi)
                vals = np.asarray(self.dom.g(u, v))
                self.evals += vals.size
                ok = np.isfinite(vals)
                finite = finite and bool(np.all(ok))
                q.append(np.sum(np.where(ok, vals, 0.0) * w))
            values[i] = q[0]
            errors[i] = abs(q[0] - q[1]) if finite else np.inf
        return values, errors

    # -- main loop -------------------------------------------------------------

    def run(self) -> QuadratureResult:
        dom = self.dom
        nu, nv = dom.grid
        all_points = tuple(range(len(dom.points)))
        cells = []
        for i in range(nu):
            for j in range(nv):
                u0 = dom.u0 + (dom.u1 - dom.u0) * i / nu
                u1 = dom.u0 + (dom.u1 - dom.u0) * (i + 1) / nu if i + 1 < nu else dom.u1
                v0 = dom.v0 + (dom.v1 - dom.v0) * j / nv
                v1 = dom.v0 + (dom.v1 - dom.v0) * (j + 1) / nv if j + 1 < nv else dom.v1
                cells.append(self._make_cell(u0, u1, v0, v1, all_points))

        counter = itertools.count()
        heap: list[tuple[float, int, _Cell]] = []
        frozen: list[tuple[_Cell, complex, float]] = []
        store: dict[int, tuple[_Cell, complex, float]] = {}

        def admit(batch: list[_Cell]) -> None:
            pending = []
            for cell in batch:
                if self._needs_isolation(cell):
                    for child in self._children(cell):
                        pending.append(child)
                else:
                    pending.append(cell)
            # isolation may cascade; keep splitting crowded cells before evaluating
            while any(self._needs_isolation(c) for c in pending):
                nxt = []
                for cell in pending:
                    nxt.extend(self._children(cell) if self._needs_isolation(cell) else [cell])
                pending = nxt
            vals, errs = self._evaluate(pending)
            for cell, val, err in zip(pending, vals, errs):
                ident = next(counter)
                if self._splittable(cell):
                    store[ident] = (cell, complex(val), float(err))
                    heapq.heappush(heap, (-float(err), ident, cell))
                else:
                    frozen.append((cell, complex(val), float(err)))

        admit(cells)
        converged = False
        while True:
            entries = list(store.values()) + frozen
            value = complex(
                math.fsum(e[1].real for e in entries), math.fsum(e[1].imag for e in entries)
            )
            err = math.fsum(e[2] for e in entries)
            mass = math.fsum(abs(e[1]) for e in entries)
            target = max(self.rel_tol * abs(value), self.abs_tol, MASS_FLOOR * mass)
            if err <= target:
                converged = True
                break
            if self.evals >= self.max_evals or not heap:
                break
            batch = []
            while heap and len(batch) < _BATCH:
                _, ident, cell = heapq.heappop(heap)
                store.pop(ident)
                batch.extend(self._children(cell))
            admit(batch)

        entries = sorted(list(store.values()) + frozen, key=lambda e: e[0].key())
        value = complex(math.fsum(e[1].real for e in entries), math.fsum(e[1].imag for e in entries))
        err = math.fsum(e[2] for e in entries)
        mass = math.fsum(abs(e[1]) for e in entries)
        if not converged:
            logger.warning(
                f"[Cubature] Budget exhausted: value={value}, err={err:.3e}, "
                f"cells={len(entries)}, evals={self.evals}"
            )
        return QuadratureResult(
            value=value, err_abs=err, evals=self.evals, converged=converged, abs_mass=mass
        )


def _as_real_if_possible(result: QuadratureResult, complex_valued: bool) -> QuadratureResult:
    if complex_valued:
        return result
    return QuadratureResult(
        value=float(complex(result.value).real),
        err_abs=result.err_abs,
        evals=result.evals,
        converged=result.converged,
        abs_mass=result.abs_mass,
    )


def integrate_2d(
    f: Density,
    region: Rectangle | Disk,
    registry: SingularityRegistry | None = None,
    rel_tol: float = 1e-8,
    *,
    abs_tol: float = 1e-13,
    max_evals: int = 4_000_000,
    complex_valued: bool = False,
) -> QuadratureResult:
    """
    Integrate a density with respect to dx dy over a rectangle or disk.

    Parameters
    ----------
    f : callable
        Vectorized density of the complex coordinate z = x + iy.
    region : Rectangle | Disk
        Integration region; ``Disk.theta_span`` selects sectors.
    registry : SingularityRegistry, optional
        Integrable point singularities inside or on the boundary of the region.
    rel_tol, abs_tol : float
        Stopping rule ``err <= max(rel_tol * |value|, abs_tol, MASS_FLOOR * mass)``
        where ``mass`` is the sum of |cell integrals|, an estimate of int |f|.
    max_evals : int
        Evaluation budget; when exhausted the result has ``converged=False``.
    complex_valued : bool
        Keep the imaginary part of the result.

    Returns
    -------
    QuadratureResult
    """
    registry = registry or SingularityRegistry()
    if isinstance(region, Rectangle):
        if not (region.x1 > region.x0 and region.y1 > region.y0):
            raise DomainError(f"invalid rectangle {region}")
        dom = _rectangle_domain(f, region, registry)
    elif isinstance(region, Disk):
        dom = _disk_domain(f, region, registry)
    else:
        raise DomainError(f"unsupported region type {type(region).__name__}")
    result = _AdaptiveCubature(dom, rel_tol, abs_tol, max_evals).run()
    logger.debug(
        f"[Cubature] {region} -> {result.value} ± {result.err_abs:.2e} ({result.evals} evals)"
    )
    return _as_real_if_possible(result, complex_valued)


def _w_chart_location(loc: SpherePoint) -> SpherePoint | None:
    if is_infinite(loc):
        return 0j
    z = complex(loc)
    if z == 0:
        return None
    return 1.0 / z


def integrate_sphere(
    density: Density,
    registry: SingularityRegistry | None = None,
    rel_tol: float = 1e-8,
    *,
    w_density: Density | None = None,
    half: str | None = None,
    abs_tol: float = 1e-13,
    max_evals: int = 4_000_000,
    complex_valued: bool = False,
    n_jobs: int | None = None,
) -> QuadratureResult:
    """
    Integrate a density over the Riemann sphere as two unit-disk charts.

    The gamma chart covers |gamma| <= 1 and the w chart (w = 1/gamma) covers
    |w| <= 1. Unless given, the w-chart density is ``density(1/w) / |w|^4``.

    Parameters
    ----------
    density : callable
        Vectorized density in the gamma chart w.r.t. dx dy.
    registry : SingularityRegistry, optional
        Singular points in the gamma coordinate (``INFINITY`` allowed).
    half : {"upper"}, optional
        Restrict to the upper half plane Im(gamma) >= 0.
    n_jobs : int, optional
        Worker threads for the two charts (defaults to settings).

    Returns
    -------
    QuadratureResult
        Sum of both chart integrals.
    """
    registry = registry or SingularityRegistry()
    if half not in (None, "upper"):
        raise DomainError(f"unsupported half-sphere selector {half!r}")

    if w_density is None:

        def w_density(w: np.ndarray) -> np.ndarray:
            return density(1.0 / w) / np.abs(w) ** 4

    gamma_span = (0.0, math.pi) if half == "upper" else (0.0, 2.0 * math.pi)
    w_span = (math.pi, 2.0 * math.pi) if half == "upper" else (0.0, 2.0 * math.pi)
    gamma_registry = registry.mapped(lambda loc: None if is_infinite(loc) else loc)
    w_registry = registry.mapped(_w_chart_location)

    jobs = [
        (density, Disk(0j, 1.0, gamma_span), gamma_registry),
        (w_density, Disk(0j, 1.0, w_span), w_registry),
    ]
    results = Parallel(n_jobs=n_jobs or settings.n_jobs, prefer="threads")(
        delayed(integrate_2d)(
            fn, disk, reg, rel_tol, abs_tol=abs_tol, max_evals=max_evals, complex_valued=True
        )
        for fn, disk, reg in jobs
    )
    combined = QuadratureResult.combine(list(results))
    target = max(rel_tol * abs(combined.value), abs_tol, MASS_FLOOR * combined.abs_mass)
    combined = QuadratureResult(
        value=combined.value,
        err_abs=combined.err_abs,
        evals=combined.evals,
        converged=combined.converged and combined.err_abs <= target,
        abs_mass=combined.abs_mass,
    )
    logger.debug(
        f"[Sphere] half={half} -> {combined.value} ± {combined.err_abs:.2e} "
        f"({combined.evals} evals, converged={combined.converged})"
    )
    return _as_real_if_possible(combined, complex_valued)


__all__ = [
    "Disk",
    "Rectangle",
    "integrate_2d",
    "integrate_sphere",
    "INFINITY",
    "SingularityKind",
]
