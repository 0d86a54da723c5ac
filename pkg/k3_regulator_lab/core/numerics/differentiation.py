"""
differentiation.py
=========================
Central finite differences with Richardson extrapolation.

Stencils use five points. Orders 1 and 2 carry an h^4 leading error, orders 3
and 4 an h^2 leading error; Richardson levels halve h and eliminate successive
even powers.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from k3_regulator_lab.core.exceptions import DomainError

_STENCIL_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])

# weights applied to f(x0 + k h), k = -2..2; divide by h**order * scale
_STENCILS: dict[int, tuple[np.ndarray, float, int]] = {
    1: (np.array([1.0, -8.0, 0.0, 8.0, -1.0]), 12.0, 4),
    2: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]), 12.0, 4),
    3: (np.array([-1.0, 2.0, 0.0, -2.0, 1.0]), 2.0, 2),
    4: (np.array([1.0, -4.0, 6.0, -4.0, 1.0]), 1.0, 2),
}


def _richardson(estimates: list[np.ndarray], leading_power: int) -> np.ndarray:
    """Neville-style elimination of h**p, h**(p+2), ... for halved steps."""
    table = [np.asarray(e) for e in estimates]
    power = leading_power
    while len(table) > 1:
        factor = 2.0**power
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
        power += 2
    return table[0]


def central_derivatives(
    f: Callable[[np.ndarray], np.ndarray],
    x0: float,
    h: float,
    order: int,
    levels: int = 3,
) -> np.ndarray:
    """
    Derivatives 0..order of ``f`` at ``x0``.

    Parameters
    ----------
    f : callable
        Vectorized function of a real (or complex) argument; may be complex-valued.
    x0 : float
        Expansion point.
    h : float
        Coarsest step; level ``k`` uses ``h / 2**k``.
    order : int
        Highest derivative, 0 <= order <= 4.
    levels : int
        Number of Richardson levels.

    Returns
    -------
    np.ndarray
        ``out[k]`` approximates the k-th derivative.
    """
    if not 0 <= order <= 4:
        raise DomainError(f"derivative order must be in 0..4, got {order}")
    if not h > 0 or levels < 1:
        raise DomainError(f"invalid step h={h} or levels={levels}")

    samples = []
    for level in range(levels):
        step = h / 2**level
        samples.append((step, np.asarray(f(x0 + step * _STENCIL_OFFSETS))))

    centre = samples[0][1][2]
    out = np.zeros(order + 1, dtype=np.result_type(centre, float))
    out[0] = centre
    for k in range(1, order + 1):
        weights, scale, power = _STENCILS[k]
        estimates = [np.dot(weights, values) / (scale * step**k) for step, values in samples]
        out[k] = _richardson(estimates, power)
    return out


def complex_derivative(
    g: Callable[[np.ndarray], np.ndarray],
    z0: complex,
    h: float | None = None,
    rel_tol: float = 1e-11,
    max_refinements: int = 8,
) -> complex:
    """
    First derivative of a holomorphic function at ``z0``.

    Differences are taken along the real direction. The step shrinks by 4 until
    two extrapolated estimates agree to ``rel_tol`` or stop improving.
    """
    step = h if h is not None else 1e-2 * max(1.0, abs(z0))
    previous: complex | None = None
    best: complex = complex("nan")
    best_change = math.inf
    for _ in range(max_refinements):
        estimate = complex(central_derivatives(g, z0, step, 1, levels=3)[1])
        if previous is not None:
            change = abs(estimate - previous)
            if change < best_change:
                best_change = change
                best = estimate
            if change <= rel_tol * abs(estimate):
                return estimate
            if change > 10.0 * best_change:
                break
        previous = estimate
        step *= 0.25
    return best if math.isfinite(best_change) else previous  # type: ignore[return-value]
