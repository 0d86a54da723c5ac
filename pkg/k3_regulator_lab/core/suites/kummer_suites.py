"""
kummer_suites.py
=========================
Acceptance suites for the Kummer geometry: identities of the fiber
parametrization, the special-point table and the fiber census.
"""

from __future__ import annotations

import numpy as np

from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.kummer.census import singular_fibers
from k3_regulator_lab.core.kummer.fiber import (
    biquadratic_residual,
    conic_membership_residual,
    fiber_point,
    kummer_residual,
    special_point_table,
)
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.shioda.theta_slice import ThetaSlice, theta_to_mu
from k3_regulator_lab.core.suites.base_suite import BaseSuite, CheckOutcome


def random_moduli(rng: np.random.Generator, lo: float, hi: float) -> KummerModuli:
    """Real (alpha, beta) at least 0.05 away from {0, 1} with a valid cycle."""
    while True:
        a, b = rng.uniform(lo, hi, size=2)
        if min(abs(a), abs(a - 1.0), abs(b), abs(b - 1.0)) < 0.05:
            continue
        try:
            m = KummerModuli(float(a), float(b))
        except DomainError:
            continue
        if m.cycle_valid:
            return m


def random_gamma(rng: np.random.Generator, radius: float) -> complex:
    r = radius * np.sqrt(rng.uniform())
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


class KummerIdentitySuite(BaseSuite):
    """fiber_point lies on the biquadratic, the conic and the Kummer quartic."""

    name = "kummer-identities"

    def check(self) -> CheckOutcome:
        rng = np.random.default_rng(self.seed)
        lo, hi = self.params["moduli_range"]
        tol = float(self.params["rel_residual"])
        worst = 0.0
        tested = 0
        for _ in range(int(self.params["samples"])):
            m = random_moduli(rng, lo, hi)
            p = fiber_point(random_gamma(rng, float(self.params["gamma_radius"])), m)
            if p.at_infinity:
                continue
            x, y, z, xi = complex(p.x), complex(p.y), complex(p.z), complex(p.xi)
            worst = max(
                worst,
                kummer_residual(x, y, z, m),
                biquadratic_residual(xi, z, m),
                conic_membership_residual(x, y, m),
            )
            tested += 1
        return CheckOutcome(
            worst < tol and tested > 0,
            f"max relative residual {worst:.2e} over {tested} points",
            {"max_residual": worst, "points": tested},
        )


class SpecialPointSuite(BaseSuite):
    """The eight special rows by composition against their closed forms."""

    name = "special-points"

    def check(self) -> CheckOutcome:
        m = KummerModuli(self.params["alpha"], self.params["beta"])
        rows = special_point_table(m)
        worst = max(r.error for r in rows)
        return CheckOutcome(
            len(rows) == 8 and worst < float(self.params["tolerance"]),
            f"{len(rows)} rows, max error {worst:.2e}",
            {"max_error": worst},
        )


class FiberCensusSuite(BaseSuite):
    """Census at the rank-20 point and the theta -> mu match of singular fibers."""

    name = "fiber-census"

    def check(self) -> CheckOutcome:
        census = singular_fibers(KummerModuli(self.params["alpha"], self.params["beta"]))
        expected = {float(k): v for k, v in self.params["expected"].items()}
        types_ok = all(census.type_at(complex(mu)) == kind for mu, kind in expected.items())
        distinct = sorted({round(v.real, 9) for v in census.finite_values()})
        census_ok = types_ok and distinct == sorted(expected)

        thetas = [float(t) for t in self.params["thetas"]]
        images = sorted(theta_to_mu(t) for t in thetas)
        singular = sorted(t for t, _ in ThetaSlice().singular_thetas())
        map_ok = images == sorted(expected) and np.allclose(singular, sorted(thetas), atol=1e-7)
        return CheckOutcome(
            census_ok and map_ok,
            f"census {census.types()}, theta images {images}",
            {"types": census.types(), "images": images},
        )
