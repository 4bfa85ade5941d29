from dataclasses import dataclass, field

import pandas as pd

from collapsim.flash import FlashChain

SCHEMA_VERSION = 1


@dataclass
class Metric:
    value: float
    tolerance: str
    passed: bool
    ci_low: float | None = None
    ci_high: float | None = None

    def __post_init__(self):
        self.value = float(self.value)
        self.passed = bool(self.passed)
        if self.ci_low is not None:
            self.ci_low = float(self.ci_low)
        if self.ci_high is not None:
            self.ci_high = float(self.ci_high)


@dataclass
class ExperimentResult:
    metrics: dict[str, Metric] = field(default_factory=dict)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    chains: list[FlashChain] = field(default_factory=list)
    reports: dict[str, dict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(metric.passed for metric in self.metrics.values())


@dataclass
class RunSummary:
    experiment: str
    seed: int
    trials: int
    config: dict
    passed: bool = False
    metrics: dict[str, Metric] = field(default_factory=dict)
    error: dict | None = None
    version: str = ""
    schema_version: int = SCHEMA_VERSION
    run: dict = field(default_factory=dict)
