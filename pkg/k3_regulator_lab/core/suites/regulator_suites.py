"""
regulator_suites.py
=========================
Acceptance suites for the real regulator integrals: the pullback oracle,
the vanishing of eta, the limit at alpha = 1, the appendix estimates and
the asymptotics of normalized psi.
"""

from __future__ import annotations

import numpy as np

from k3_regulator_lab.core.exceptions import OracleUndefinedError
from k3_regulator_lab.core.kummer.moduli import KummerModuli
from k3_regulator_lab.core.regulator.appendix import appendix_bound_check, estat2_divergence
from k3_regulator_lab.core.regulator.asymptotics import decay_profile, psi_asymptotic_fit
from k3_regulator_lab.core.regulator.density import density_general, pullback_oracle
from k3_regulator_lab.core.regulator.psi import limit_check, psi
from k3_regulator_lab.core.suites.base_suite import BaseSuite, CheckOutcome
from k3_regulator_lab.core.suites.kummer_suites import random_gamma


class PullbackOracleSuite(BaseSuite):
    """|density_general| against the chain-rule pullback at seeded random points."""

    name = "pullback-oracle"

    def check(self) -> CheckOutcome:
        rng = np.random.default_rng(self.seed)
        m = KummerModuli(self.params["alpha"], self.params["beta"])
        worst = 0.0
        tested = 0
        for _ in range(int(self.params["samples"])):
            gamma = random_gamma(rng, 3.0)
            try:
                oracle = abs(pullback_oracle(gamma, m))
            except OracleUndefinedError:
                continue
            value = abs(density_general(gamma, m))
            worst = max(worst, abs(value - oracle) / oracle)
            tested += 1
        return CheckOutcome(
            tested > 0 and worst < float(self.params["rel_error"]),
            f"max relative error {worst:.2e} over {tested} points",
            {"max_rel_error": worst, "points": tested},
        )


class EtaVanishingSuite(BaseSuite):
    """|eta(alpha)| <= max(1e-4, 1e-3 |psi(alpha)|)."""

    name = "eta-vanishing"

    def check(self) -> CheckOutcome:
        tol = float(self.params["tol"])
        results = [psi(a, tol) for a in self.params["alphas"]]
        ok = all(abs(r.eta) <= max(1e-4, 1e-3 * abs(r.psi)) and r.converged for r in results)
        detail = ", ".join(f"alpha={r.alpha.real:g}: eta={r.eta:.2e} (psi={r.psi:.6g})" for r in results)
        return CheckOutcome(ok, detail, {"eta": [r.eta for r in results], "psi": [r.psi for r in results]})


class LimitAtOneSuite(BaseSuite):
    """I(1) > 0, sphere = 2 x upper half plane, psi trends to -16 I(1)."""

    name = "limit-at-one"

    def check(self) -> CheckOutcome:
        report = limit_check(float(self.params["tol"]), tuple(self.params["alphas"]))
        return CheckOutcome(
            report.passed,
            f"I(1)={report.i_one:.10g}, half-plane rel err {report.half_plane_rel_err:.1e}, "
            f"last gap {report.gaps[-1]:.2%}",
            {"i_one": report.i_one, "gaps": report.gaps},
        )


class AppendixSuite(BaseSuite):
    """Total bounded by 1000 pi eps; the alpha -> 2 local integral diverges like C log(1/chi)."""

    name = "appendix"

    def check(self) -> CheckOutcome:
        tol = float(self.params["tol"])
        reports = [appendix_bound_check(float(e), float(c), tol) for e, c in self.params["bound_points"]]
        fit = estat2_divergence(tuple(self.params["estat2_chis"]), float(self.params["estat2_tol"]))
        ok = all(r.passed for r in reports) and fit.stable and fit.slope != 0.0
        detail = "; ".join(f"eps={r.eps:g}: {r.total:.4g} <= {r.bound:.4g}" for r in reports)
        detail += f"; estat2 C={fit.slope:.6g} (pair slopes {[round(s, 4) for s in fit.decade_slopes]})"
        return CheckOutcome(ok, detail, {"totals": [r.total for r in reports], "slope": fit.slope})


class AsymptoticsSuite(BaseSuite):
    """Nonzero log-fit constants at alpha -> 2 and alpha -> -1; decay as alpha -> 0."""

    name = "asymptotics"

    def check(self) -> CheckOutcome:
        tol = float(self.params["tol"])
        exponents = tuple(self.params["exponents"])
        fits = [
            psi_asymptotic_fit(float(c), exponents, tol, float(side)) for c, side in self.params["centers"]
        ]
        decay = decay_profile(
            tuple(self.params["decay_alphas"]), tuple(self.params["reference_alphas"]), tol
        )
        ok = all(f.stable for f in fits) and decay.passed
        detail = ", ".join(f"c={f.center:g}: A={f.slope:.6g} (residual {f.residual:.2e})" for f in fits)
        detail += (
            f"; decay past peak {[f'{v:.4g}' for v in decay.tail.values]}"
            f" (1/psi slope {decay.reciprocal_fit.slope:.3g})"
            f"; before peak {[f'{v:.4g}' for v in decay.reference.values]}"
        )
        metrics = {
            "slopes": [f.slope for f in fits],
            "decay": decay.tail.values,
            "reference": decay.reference.values,
            "reference_decreasing": decay.reference.decreasing,
        }
        return CheckOutcome(ok, detail, metrics)
