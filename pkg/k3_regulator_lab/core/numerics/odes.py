"""
odes.py
=========================
Linear ODEs with rational coefficients.

Features
--------
- ``RationalODE``: exact sympy coefficients, integer polynomial pairs,
  singular points, vectorized coefficient evaluation
- Exact derivative jets from the ODE itself (no finite differences)
- ``ode_residual``: normalized residual of a sampled function by central
  differences with Richardson extrapolation
- ``solve_ivp``: DOP853 initial value solver with dense output
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Sequence

import numpy as np
import sympy
from scipy import integrate

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import ConvergenceError, DomainError
from k3_regulator_lab.core.numerics.differentiation import central_derivatives

_IVP_RTOL = 1e-12
_IVP_ATOL = 1e-14


def _integer_pair(expr: sympy.Expr, x: sympy.Symbol) -> tuple[list[int], list[int]]:
    """Numerator and denominator of ``expr`` as integer coefficient lists (highest degree first)."""
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    p_num = sympy.Poly(num, x)
    p_den = sympy.Poly(den, x)
    c_num, p_num = p_num.clear_denoms()
    c_den, p_den = p_den.clear_denoms()
    # expr = (p_num / c_num) / (p_den / c_den) = (c_den * p_num) / (c_num * p_den)
    p_num = p_num * sympy.Integer(c_den)
    p_den = p_den * sympy.Integer(c_num)
    return [int(c) for c in p_num.all_coeffs()], [int(c) for c in p_den.all_coeffs()]


@dataclass(frozen=True)
class RationalODE:
    """
    Linear ODE ``sum_k c_k(x) f^(k)(x) = 0`` with rational coefficients.

    ``coeffs[k]`` multiplies the k-th derivative; the last entry is the
    leading coefficient and must not vanish identically.
    """

    name: str
    variable: sympy.Symbol
    coeffs: tuple[sympy.Expr, ...]
    _jet_cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        if len(self.coeffs) < 2:
            raise DomainError(f"{self.name}: an ODE needs order >= 1")
        if sympy.simplify(self.coeffs[-1]) == 0:
            raise DomainError(f"{self.name}: leading coefficient vanishes identically")

    @classmethod
    def from_expressions(cls, name: str, exprs: Sequence[Any], variable: str = "x") -> "RationalODE":
        x = sympy.Symbol(variable)
        coeffs = tuple(sympy.sympify(e, locals={variable: x}, rational=True) for e in exprs)
        return cls(name=name, variable=x, coeffs=coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def numerator_denominator(self) -> list[tuple[list[int], list[int]]]:
        """Integer (numerator, denominator) coefficient lists of every c_k."""
        return [_integer_pair(c, self.variable) for c in self.coeffs]

    @cached_property
    def _normalized(self) -> tuple[sympy.Expr, ...]:
        lead = self.coeffs[-1]
        return tuple(sympy.cancel(c / lead) for c in self.coeffs[:-1])

    @cached_property
    def _coefficient_fn(self) -> Callable[..., Any]:
        return sympy.lambdify([self.variable], list(self.coeffs), "numpy")

    def singular_points(self) -> list[complex]:
        """Roots of the denominators of the normalized coefficients c_k / c_n."""
        points: list[complex] = []
        for expr in self._normalized:
            _, den = sympy.fraction(sympy.cancel(expr))
            poly = sympy.Poly(den, self.variable)
            if poly.degree() < 1:
                continue
            for root in poly.nroots(n=17):
                z = complex(root)
                if not any(abs(z - p) <= 1e-12 * max(1.0, abs(z)) for p in points):
                    points.append(z)
        return sorted(points, key=lambda z: (z.real, z.imag))

    def distance_to_singularity(self, x0: complex) -> float:
        points = self.singular_points()
        return min((abs(complex(x0) - p) for p in points), default=math.inf)

    def coefficients_at(self, x: Any) -> np.ndarray:
        """Array of shape (order + 1, *shape(x)) with c_k(x)."""
        values = self._coefficient_fn(x)
        shape = np.shape(x)
        return np.stack([np.broadcast_to(np.asarray(v), shape) for v in values])

    def residual(self, x: Any, derivatives: Sequence[Any]) -> tuple[Any, Any]:
        """Return (sum_k c_k f^(k), sum_k |c_k f^(k)|) at ``x``."""
        c = self.coefficients_at(x)
        terms = c * np.asarray(derivatives)[: self.order + 1]
        return np.sum(terms, axis=0), np.sum(np.abs(terms), axis=0)

    def _jet_rows(self, extra: int) -> Callable[..., Any]:
        """
        Lambdified rows A_m (m < extra) with f^(n+m) = sum_k A_m[k] f^(k), k < n.
        """
        if extra in self._jet_cache:
            return self._jet_cache[extra]
        x = self.variable
        n = self.order
        p = self._normalized
        rows = [[-pk for pk in p]]
        for _ in range(1, extra):
            a = rows[-1]
            nxt = []
            for k in range(n):
                term = sympy.diff(a[k], x) - a[n - 1] * p[k]
                if k >= 1:
                    term += a[k - 1]
                nxt.append(sympy.cancel(term))
            rows.append(nxt)
        fn = sympy.lambdify([x], rows, "numpy")
        self._jet_cache[extra] = fn
        return fn

    def jet(self, x: float, values: Sequence[Any], order: int) -> np.ndarray:
        """
        Derivatives 0..order at ``x`` of the solution with initial jet ``values``.

        ``values`` holds f, f', ..., f^(n-1) at ``x``; higher derivatives follow
        exactly from the equation.
        """
        n = self.order
        if len(values) != n:
            raise DomainError(f"{self.name}: jet needs {n} initial values, got {len(values)}")
        base = np.asarray(values)
        out = np.zeros(order + 1, dtype=np.result_type(base, float))
        out[: min(n, order + 1)] = base[: order + 1]
        extra = order + 1 - n
        if extra > 0:
            rows = self._jet_rows(extra)(x)
            for m in range(extra):
                out[n + m] = sum(r * v for r, v in zip(rows[m], base))
        return out


def ode_residual(
    ode: RationalODE,
    f: Callable[[np.ndarray], np.ndarray],
    x0: float,
    h: float | None = None,
    levels: int = 3,
) -> float:
    """
    Normalized residual |sum c_k f^(k)| / sum |c_k f^(k)| at ``x0``.

    Parameters
    ----------
    ode : RationalODE
        Operator to apply.
    f : callable
        Vectorized function, evaluable on the stencil around ``x0``.
    x0 : float
        Evaluation point.
    h : float, optional
        Coarsest stencil step; defaults to ``min(0.05 max(1, |x0|), dist / 5)``
        where ``dist`` is the distance to the nearest singular point.
    levels : int
        Richardson levels.

    Raises
    ------
    DomainError
        If the stencil reaches a singular point of the coefficients.
    """
    dist = ode.distance_to_singularity(x0)
    if dist == 0.0:
        logger.error(f"[ODE] {ode.name}: x0={x0} is a singular point")
        raise DomainError(f"{ode.name}: x0={x0} is a singular point of the coefficients")
    if h is None:
        h = min(0.05 * max(1.0, abs(x0)), dist / 5.0)
    elif 2.0 * h >= dist:
        logger.error(f"[ODE] {ode.name}: stencil of half-width {2 * h} reaches a pole at distance {dist}")
        raise DomainError(f"{ode.name}: stencil around {x0} with h={h} crosses a singular point")
    derivatives = central_derivatives(f, x0, h, ode.order, levels=levels)
    total, scale = ode.residual(x0, derivatives)
    scale = float(scale)
    if scale == 0.0:
        return 0.0
    return float(abs(total)) / scale


@dataclass(frozen=True)
class SampledSolution:
    """Dense IVP solution on an interval; callable like a function."""

    ode: RationalODE
    interval: tuple[float, float]
    dense: Any
    nfev: int

    def _check(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = min(self.interval), max(self.interval)
        span = hi - lo
        if np.any(x < lo - 1e-12 * span) or np.any(x > hi + 1e-12 * span):
            raise DomainError(f"{self.ode.name}: evaluation outside {self.interval}")
        return x

    def __call__(self, x: Any) -> Any:
        return self.dense(self._check(x))[0]

    def derivative(self, x: Any, k: int = 1) -> Any:
        """k-th derivative for k < order from the dense state vector."""
        if not 0 <= k < self.ode.order:
            raise DomainError(f"dense output carries derivatives 0..{self.ode.order - 1}")
        return self.dense(self._check(x))[k]

    def state(self, x: float) -> np.ndarray:
        return self.dense(float(self._check(x)))

    def jet(self, x: float, order: int) -> np.ndarray:
        """Derivatives 0..order at ``x``, higher ones exact from the ODE."""
        return self.ode.jet(float(x), self.state(x), order)


def solve_ivp(
    ode: RationalODE,
    y0: float,
    dy0: float,
    interval: tuple[float, float],
    *higher: float,
    rtol: float = _IVP_RTOL,
    atol: float = _IVP_ATOL,
) -> SampledSolution:
    """
    Solve an initial value problem for a linear ODE with rational coefficients.

    Parameters
    ----------
    ode : RationalODE
        Order-n operator (order 2 for the usual (y0, y0') data; extra
        initial derivatives go in ``higher``).
    y0, dy0 : float
        Initial value and slope at ``interval[0]``.
    interval : (float, float)
        Integration interval; must not contain a real singular point.

    Returns
    -------
    SampledSolution

    Raises
    ------
    DomainError
        If the interval crosses a coefficient pole.
    ConvergenceError
        If the integrator fails.
    """
    a, b = float(interval[0]), float(interval[1])
    if a == b:
        raise DomainError("solve_ivp needs a non-degenerate interval")
    initial = [float(y0), float(dy0), *map(float, higher)]
    if len(initial) != ode.order:
        raise DomainError(f"{ode.name}: order {ode.order} needs {ode.order} initial values")
    lo, hi = min(a, b), max(a, b)
    for p in ode.singular_points():
        if abs(p.imag) <= 1e-12 * max(1.0, abs(p)) and lo <= p.real <= hi:
            logger.error(f"[ODE] {ode.name}: interval {interval} crosses singular point {p.real}")
            raise DomainError(f"{ode.name}: interval {interval} contains singular point {p.real}")

    n = ode.order

    def rhs(x: float, y: np.ndarray) -> np.ndarray:
        c = ode.coefficients_at(x)
        dy = np.empty_like(y)
        dy[:-1] = y[1:]
        dy[-1] = -float(np.dot(c[:n], y)) / float(c[n])
        return dy

    sol = integrate.solve_ivp(
        rhs, (a, b), initial, method="DOP853", rtol=rtol, atol=atol, dense_output=True
    )
    if not sol.success:
        logger.error(f"[ODE] {ode.name}: integrator failed: {sol.message}")
        raise ConvergenceError(f"{ode.name}: IVP failed on {interval}: {sol.message}")
    logger.debug(f"[ODE] {ode.name}: solved on {interval} with {sol.nfev} evaluations")
    return SampledSolution(ode=ode, interval=(a, b), dense=sol.sol, nfev=int(sol.nfev))
