"""
picardfuchs_suites.py
=========================
Acceptance suites for the Picard-Fuchs transcriptions and the two-isogeny
parametrization, each with a negative control.
"""

from __future__ import annotations

import numpy as np

from k3_regulator_lab.core.numerics.odes import ode_residual
from k3_regulator_lab.core.picardfuchs.checks import (
    decoupled_residual_table,
    tensor_product_check,
    two_isogeny_check,
)
from k3_regulator_lab.core.picardfuchs.operators import PFSuite
from k3_regulator_lab.core.picardfuchs.periods import normalized_period
from k3_regulator_lab.core.suites.base_suite import BaseSuite, CheckOutcome


def _not_a_period(j: np.ndarray) -> np.ndarray:
    """j times the normalized period; solves nothing."""
    return np.asarray(j) * np.vectorize(normalized_period, otypes=[float])(j)


class PicardFuchsSuite(BaseSuite):
    """Decoupled operator on the normalized period; quartic on tensor products."""

    name = "picard-fuchs"

    def check(self) -> CheckOutcome:
        js = [float(j) for j in self.params["js"]]
        table = decoupled_residual_table(js, tuple(self.params["levels"]))
        best = table.drop(columns="j").min(axis=1)
        decoupled = float(best.max())

        ode = PFSuite.build().decoupled
        control = min(ode_residual(ode, _not_a_period, j) for j in js)

        interval = tuple(float(x) for x in self.params["interval"])
        tensor = tensor_product_check(interval)
        tensor_control = tensor_product_check(interval, partner="exp")

        floor = float(self.params["negative_floor"])
        ok = (
            decoupled < float(self.params["decoupled_tol"])
            and tensor.max_residual < float(self.params["tensor_tol"])
            and control > floor
            and tensor_control.max_residual > floor
        )
        return CheckOutcome(
            ok,
            f"decoupled {decoupled:.2e} (control {control:.2e}), "
            f"tensor {tensor.max_residual:.2e} (control {tensor_control.max_residual:.2e})",
            {
                "decoupled": decoupled,
                "decoupled_control": control,
                "tensor": tensor.max_residual,
                "tensor_control": tensor_control.max_residual,
            },
        )


class TwoIsogenySuite(BaseSuite):
    """One j-scaling matches (j(tau), j(2 tau)) at every tau; a perturbed j(2 tau) matches none."""

    name = "two-isogeny"

    def check(self) -> CheckOutcome:
        reports = [two_isogeny_check(float(y)) for y in self.params["ys"]]
        passing = [tuple(r.passing_scalings) for r in reports]
        consistent = len(set(passing)) == 1 and len(passing[0]) == 1
        control = two_isogeny_check(
            float(self.params["control_y"]), float(self.params["control_perturbation"])
        )
        ok = consistent and not control.passing_scalings
        scaling = passing[0][0] if consistent else None
        return CheckOutcome(
            ok,
            f"scaling {scaling} at every tau; perturbed control passes {control.passing_scalings}",
            {"scaling": scaling, "per_tau": [list(p) for p in passing]},
        )
