"""
registry.py
=========================
Registry of acceptance suites:
- look up a suite class by name
- build suites with their packaged parameters
- list what ``verify`` can run
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Type

from k3_regulator_lab.config.logger_config import logger
from k3_regulator_lab.core.exceptions import DomainError
from k3_regulator_lab.core.suites.base_suite import BaseSuite
from k3_regulator_lab.core.suites.kummer_suites import (
    FiberCensusSuite,
    KummerIdentitySuite,
    SpecialPointSuite,
)
from k3_regulator_lab.core.suites.picardfuchs_suites import PicardFuchsSuite, TwoIsogenySuite
from k3_regulator_lab.core.suites.regulator_suites import (
    AppendixSuite,
    AsymptoticsSuite,
    EtaVanishingSuite,
    LimitAtOneSuite,
    PullbackOracleSuite,
)
from k3_regulator_lab.core.suites.shioda_suites import KappaSuite
from k3_regulator_lab.core.utils.serialization import load_yaml

ACCEPTANCE_CONFIG = Path(__file__).resolve().parents[2] / "config" / "acceptance_config.yaml"

# config block -> suite class, in criterion order
_SUITES: dict[str, Type[BaseSuite]] = {
    "kummer_identities": KummerIdentitySuite,
    "special_points": SpecialPointSuite,
    "fiber_census": FiberCensusSuite,
    "pullback_oracle": PullbackOracleSuite,
    "eta_vanishing": EtaVanishingSuite,
    "limit_at_one": LimitAtOneSuite,
    "appendix": AppendixSuite,
    "asymptotics": AsymptoticsSuite,
    "picard_fuchs": PicardFuchsSuite,
    "two_isogeny": TwoIsogenySuite,
    "kappa": KappaSuite,
}


class SuiteRegistry:
    """
    Suites by their CLI name (``kummer-identities``, ``kappa``, ...).
    """

    def __init__(self, config_path: str | Path = ACCEPTANCE_CONFIG):
        self.config = load_yaml(config_path)
        self._by_name = {cls.name: (block, cls) for block, cls in _SUITES.items()}

    @property
    def names(self) -> list[str]:
        return list(self._by_name)

    def full_run_limit(self) -> float:
        """Seconds allowed for the whole ``verify --all`` run."""
        return float(self.config.get("full_run", {}).get("max_seconds", 900.0))

    def build(self, names: Iterable[str] | None = None, seed: int = 42) -> list[BaseSuite]:
        """
        Instantiate suites (all of them when ``names`` is None), in criterion order.

        Raises
        ------
        DomainError
            For an unknown suite name.
        """
        wanted = self.names if names is None else list(names)
        unknown = [n for n in wanted if n not in self._by_name]
        if unknown:
            logger.error(f"[Registry] Unknown suites {unknown}; known: {self.names}")
            raise DomainError(f"unknown suite(s) {unknown}; known: {self.names}")
        suites = []
        for name in self.names:
            if name in wanted:
                block, cls = self._by_name[name]
                suites.append(cls(self.config[block], seed=seed))
        logger.info(f"[Registry] Built {len(suites)} suite(s): {[s.name for s in suites]}")
        return suites
