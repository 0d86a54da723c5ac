"""
shioda_suites.py
=========================
Acceptance suite for kappa: the two tail strategies, positivity, the
continued-fraction check and the J-invariant relation at the rank-20 point.
"""

from __future__ import annotations

from k3_regulator_lab.core.numerics.types import PrecisionMode
from k3_regulator_lab.core.shioda.kappa import (
    kappa,
    kappa_at_two_precisions,
    kappa_cf_report,
    kappa_dual_strategy_check,
)
from k3_regulator_lab.core.shioda.theta_slice import j_consistency
from k3_regulator_lab.core.suites.base_suite import BaseSuite, CheckOutcome


class KappaSuite(BaseSuite):
    name = "kappa"

    def check(self) -> CheckOutcome:
        rel_tol = float(self.params["rel_tol"])
        dual = kappa_dual_strategy_check(rel_tol)
        pair = kappa_at_two_precisions(rel_tol, PrecisionMode.EXTENDED, int(self.params["dps"]), kappa)
        cf = kappa_cf_report(pair, int(self.params["cf_terms"]))
        residuals = j_consistency(0.5, 0.5, 1.0, 0.0)
        k = float(dual.substitution.kappa)
        ok = (
            dual.rel_diff < float(self.params["dual_tol"])
            and k > 0.0
            and cf.stable_count >= int(self.params["min_stable_terms"])
            and max(residuals) < float(self.params["j_consistency_tol"])
        )
        return CheckOutcome(
            ok,
            f"kappa={k!r}, strategies differ by {dual.rel_diff:.1e}, "
            f"{cf.stable_count} stable CF terms, J residuals {residuals[0]:.1e}/{residuals[1]:.1e}",
            {
                "kappa": k,
                "rel_diff": dual.rel_diff,
                "stable_terms": list(cf.stable_terms),
                "j_residuals": list(residuals),
            },
        )
