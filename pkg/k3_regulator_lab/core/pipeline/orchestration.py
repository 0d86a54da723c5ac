"""
orchestration.py
=========================
Verification orchestration:
- Builds the requested acceptance suites from the registry
- Runs them one after another (parallelism lives inside the numerics)
- Aggregates a pass/fail table with elapsed times
- Derives the exit code, the full run itself counting as the last criterion
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

import pandas as pd

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.suites.base_suite import SuiteResult
from k3_regulator_lab.core.suites.registry import SuiteRegistry

FULL_RUN_NAME = "full-run"
FULL_RUN_CRITERION = 12


@dataclass
class VerificationRun:
    results: list[SuiteResult] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(
            [r.as_row() for r in self.results],
            columns=["suite", "criterion", "passed", "elapsed_s", "detail"],
        )


def run_verification(
    names: Iterable[str] | None = None,
    seed: int = 42,
    registry: SuiteRegistry | None = None,
) -> VerificationRun:
    """
    Run acceptance suites and collect their results.

    Parameters
    ----------
    names : iterable of str, optional
        Suite names; None runs every suite and adds the full-run criterion
        (total runtime within the packaged limit, every suite passing).
    seed : int
        Seed handed to the randomized suites.
    registry : SuiteRegistry, optional
        Source of suites and parameters.
    """
    registry = registry or SuiteRegistry()
    logger.info("========== Starting Verification ==========")
    start = time.perf_counter()
    run = VerificationRun()
    for suite in registry.build(names, seed=seed):
        run.results.append(suite.run())
    run.elapsed_s = time.perf_counter() - start

    if names is None:
        limit = registry.full_run_limit()
        all_ok = all(r.passed for r in run.results)
        ok = all_ok and run.elapsed_s <= limit
        run.results.append(
            SuiteResult(
                FULL_RUN_NAME,
                FULL_RUN_CRITERION,
                ok,
                run.elapsed_s,
                f"{sum(r.passed for r in run.results)}/{len(run.results)} suites passed "
                f"in {run.elapsed_s:.1f}s (limit {limit:g}s)",
            )
        )

    summary = run.table()
    logger.info(f"[Verify] Summary:\n{summary.drop(columns='detail').to_string(index=False)}")
    if run.passed:
        logger.success(f"========== Verification passed ({run.elapsed_s:.1f}s) ==========")
    else:
        failed = [r.name for r in run.results if not r.passed]
        logger.error(f"========== Verification FAILED: {failed} ==========")
    return run
