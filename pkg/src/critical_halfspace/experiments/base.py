from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from critical_halfspace.core.errors import HalfspaceError
from critical_halfspace.core.types import NewtonConfig
from critical_halfspace.fields.bubble import BubbleField, make_bubble, make_harmonic

if TYPE_CHECKING:
    from critical_halfspace.config.loader import RunConfig
    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)


@dataclass
class ExperimentReport:
    subcommand: str
    metrics: dict[str, Any] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    tables: dict[str, tuple[list[str], np.ndarray]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, **metrics: Any) -> None:
        self.metrics.update(metrics)

    def check(self, name: str, value: Any, ok: bool) -> None:
        """Record a metric and mark it failed when ``ok`` is false."""
        self.metrics[name] = value
        if not ok:
            self.failures.append(name)


class Experiment:
    name: str
    description: str

    def run(self, config: RunConfig) -> ExperimentReport:
        report = ExperimentReport(self.name)
        try:
            self.execute(config, report)
        except HalfspaceError as exc:
            logger.warning("%s aborted: %s", self.name, exc)
            report.metrics["error"] = f"{type(exc).__name__}: {exc}"
            report.failures.append("error")
        return report

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        raise NotImplementedError


def subject_bubble(config: RunConfig) -> BubbleField:
    return make_bubble(config.n, config.lam, config.tangential)


def subject_field(config: RunConfig) -> tuple[ScalarField, float]:
    """Field under test and the interior coefficient κ it satisfies."""
    if config.family == "harmonic":
        return make_harmonic(config.n, config.c, config.tangential), 0.0
    return subject_bubble(config), 1.0


def lambda_grid(config: RunConfig) -> np.ndarray:
    return np.linspace(config.lambda_min, config.lambda_max, config.lambda_count)


def newton_config(config: RunConfig) -> NewtonConfig:
    return NewtonConfig(
        tol=config.newton_tol,
        max_iter=config.max_iter,
        damping=config.damping,
        continuation_steps=config.continuation_steps,
    )
