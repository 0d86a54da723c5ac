import math

import pytest

import k3_regulator_lab.core.regulator.asymptotics as asymptotics_module
from k3_regulator_lab.core.exceptions import ConvergenceError, DomainError
from k3_regulator_lab.core.pipeline.orchestration import FULL_RUN_CRITERION, run_verification
from k3_regulator_lab.core.regulator.psi import PsiResult
from k3_regulator_lab.core.suites.base_suite import BaseSuite, CheckOutcome
from k3_regulator_lab.core.suites.registry import SuiteRegistry

EXPECTED_NAMES = [
    "kummer-identities",
    "special-points",
    "fiber-census",
    "pullback-oracle",
    "eta-vanishing",
    "limit-at-one",
    "appendix",
    "asymptotics",
    "picard-fuchs",
    "two-isogeny",
    "kappa",
]


class _RaisingSuite(BaseSuite):
    name = "raising"

    def check(self) -> CheckOutcome:
        raise ConvergenceError("budget exhausted")


class _PassingSuite(BaseSuite):
    name = "passing"

    def check(self) -> CheckOutcome:
        return CheckOutcome(True, "ok", {"value": 1.0})


def test_registry_names_follow_criterion_order():
    registry = SuiteRegistry()
    assert registry.names == EXPECTED_NAMES
    criteria = [s.criterion for s in registry.build()]
    assert criteria == list(range(1, 12))
    assert registry.full_run_limit() > 0


def test_registry_rejects_unknown_suite():
    with pytest.raises(DomainError):
        SuiteRegistry().build(["kummer-identities", "nonsense"])


def test_lab_errors_become_failed_results():
    result = _RaisingSuite({"criterion": 99}).run()
    assert not result.passed
    assert result.criterion == 99
    assert "ConvergenceError" in result.detail


def test_runtime_limit_fails_a_passing_check():
    result = _PassingSuite({"criterion": 1, "max_seconds": -1.0}).run()
    assert not result.passed
    assert "exceeds" in result.detail
    assert result.as_row()["suite"] == "passing"


FAST_SUITES = ["kummer-identities", "special-points", "fiber-census", "two-isogeny"]


@pytest.mark.parametrize("name", FAST_SUITES)
def test_fast_suites_pass(name):
    run = run_verification([name], seed=42)
    assert run.passed, run.results[0].detail
    assert run.exit_code == 0
    assert all(r.criterion != FULL_RUN_CRITERION for r in run.results)


def _log_law_psi(alpha, tol=1e-6):
    near_zero = {0.1: 0.2488, 0.05: 0.2613, 0.02: 0.2516, 0.01: 0.237, 0.003: 0.21, 0.001: 0.188}
    alpha = float(alpha)
    if alpha in near_zero:
        value = near_zero[alpha]
    else:
        center = 2.0 if alpha > 1.0 else -1.0
        value = 0.7 * math.log(abs(alpha - center)) + 0.1
    return PsiResult(alpha=alpha, psi=0.0, eta=0.0, psi_normalized=value, err_abs=0.0, evals=0)


def test_asymptotics_suite_reports_the_sequence_before_the_peak(monkeypatch):
    monkeypatch.setattr(asymptotics_module, "psi", _log_law_psi)
    (suite,) = SuiteRegistry().build(["asymptotics"])
    result = suite.run()
    assert result.passed, result.detail
    assert result.metrics["reference"] == [0.2488, 0.2613, 0.2516]
    assert result.metrics["reference_decreasing"] is False
    assert result.metrics["slopes"] == pytest.approx([0.7, 0.7], rel=1e-9)
    assert "before peak" in result.detail


def test_verification_table_columns():
    run = run_verification(["special-points"])
    table = run.table()
    assert list(table.columns) == ["suite", "criterion", "passed", "elapsed_s", "detail"]
    assert table["suite"].tolist() == ["special-points"]


SLOW_SUITES = [name for name in EXPECTED_NAMES if name not in FAST_SUITES]


@pytest.mark.slow
@pytest.mark.parametrize("name", SLOW_SUITES)
def test_slow_suite_passes(name):
    run = run_verification([name], seed=42)
    assert run.passed, run.results[0].detail


@pytest.mark.slow
def test_full_run_passes_every_criterion():
    run = run_verification(None, seed=42)
    failed = {r.name: r.detail for r in run.results if not r.passed}
    assert run.exit_code == 0, failed
    assert [r.criterion for r in run.results] == list(range(1, 13))
    assert run.results[-1].criterion == FULL_RUN_CRITERION

