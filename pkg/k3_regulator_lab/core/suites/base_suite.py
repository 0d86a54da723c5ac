"""
base_suite.py
=========================
Abstract base class for the acceptance suites run by ``verify``.

Provides a unified interface for:
- running one acceptance criterion with its packaged parameters
- timing the run and turning domain / convergence errors into a failed result
- a one-line pass/fail record for the summary table
"""

from __future__ import annotations

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import LabError


@dataclass(frozen=True)
class SuiteResult:
    name: str
    criterion: int
    passed: bool
    elapsed_s: float
    detail: str = ""
    metrics: dict[str, Any] = field(default_factory=dict)

    def as_row(self) -> dict[str, Any]:
        return {
            "suite": self.name,
            "criterion": self.criterion,
            "passed": self.passed,
            "elapsed_s": self.elapsed_s,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class CheckOutcome:
    """What ``BaseSuite.check`` returns: the verdict, a short explanation and numbers."""

    passed: bool
    detail: str
    metrics: dict[str, Any] = field(default_factory=dict)


class BaseSuite(ABC):
    """
    Abstract base suite for every acceptance criterion.
    """

    name: str = "base"

    def __init__(self, params: dict[str, Any], seed: int = 42):
        """
        Initialize the suite.

        Parameters
        ----------
        params : dict
            The suite's block of ``acceptance_config.yaml``.
        seed : int
            Seed for randomized property checks.
        """
        self.params = params
        self.seed = seed
        self.criterion = int(params.get("criterion", 0))

    @abstractmethod
    def check(self) -> CheckOutcome:
        """Run the numerical checks of this criterion."""

    def run(self) -> SuiteResult:
        """Time ``check`` and convert lab errors into a failed result."""
        logger.info(f"[Verify] Running {self.name} (criterion {self.criterion})...")
        start = time.perf_counter()
        try:
            outcome = self.check()
        except LabError as e:
            elapsed = time.perf_counter() - start
            logger.error(f"[Verify] {self.name} raised {type(e).__name__}: {e}")
            return SuiteResult(self.name, self.criterion, False, elapsed, f"{type(e).__name__}: {e}")
        elapsed = time.perf_counter() - start
        max_seconds = self.params.get("max_seconds")
        passed = outcome.passed
        detail = outcome.detail
        if max_seconds is not None and elapsed > float(max_seconds):
            passed = False
            detail = f"{detail}; runtime {elapsed:.1f}s exceeds {max_seconds}s"
        if passed:
            logger.success(f"[Verify] {self.name} passed in {elapsed:.2f}s: {detail}")
        else:
            logger.error(f"[Verify] {self.name} FAILED in {elapsed:.2f}s: {detail}")
        return SuiteResult(self.name, self.criterion, passed, elapsed, detail, outcome.metrics)
