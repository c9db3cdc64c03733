"""Run-level and replication-level metric containers.

A single run produces a MetricsReport: an ordered list of named metric
values, each carrying a unit and a censoring flag. replicate() folds a
list of reports into an AggregateReport with a mean and a 95% normal
confidence interval per metric. Censored values (e.g. an MTTF tier never
crossed inside the horizon) enter the mean at their censoring point
(the horizon) and are flagged, never dropped silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import MetricError

# two-sided 95% normal quantile
_Z95 = 1.959963984540054


@dataclass
class MetricValue:
    name: str
    value: float
    unit: str
    censored: bool = False

    def __post_init__(self):
        if not self.unit:
            raise MetricError(f"metric {self.name!r} must carry a unit")


@dataclass
class MetricsReport:
    """Metrics of one run plus enough config echo to reproduce it."""

    scenario: str
    seed: int
    config: dict = field(default_factory=dict)
    metrics: list[MetricValue] = field(default_factory=list)
    overhead_bits: dict[str, int] = field(default_factory=dict)

    def add(self, name: str, value: float, unit: str, censored: bool = False):
        self.metrics.append(MetricValue(name, float(value), unit, censored))

    def get(self, name: str) -> MetricValue:
        for m in self.metrics:
            if m.name == name:
                return m
        raise KeyError(name)

    def value(self, name: str) -> float:
        return self.get(name).value


@dataclass
class AggregateMetric:
    name: str
    mean: float
    ci_low: float
    ci_high: float
    unit: str
    censored_count: int = 0


@dataclass
class AggregateReport:
    scenario: str
    master_seed: int
    replications: int
    config: dict = field(default_factory=dict)
    metrics: list[AggregateMetric] = field(default_factory=list)
    overhead_bits: dict[str, float] = field(default_factory=dict)

    def get(self, name: str) -> AggregateMetric:
        for m in self.metrics:
            if m.name == name:
                return m
        raise KeyError(name)


def mean_ci(values: list[float]) -> tuple[float, float, float]:
    """Mean and 95% normal-approximation CI. One sample => zero half-width."""
    n = len(values)
    if n == 0:
        raise MetricError("cannot aggregate an empty sample")
    mean = sum(values) / n
    if n == 1:
        return mean, mean, mean
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    half = _Z95 * math.sqrt(var / n)
    return mean, mean - half, mean + half


def aggregate(reports: list[MetricsReport], master_seed: int) -> AggregateReport:
    """Fold per-run reports (all from one scenario) into mean +/- CI."""
    if not reports:
        raise MetricError("no reports to aggregate")
    first = reports[0]
    agg = AggregateReport(
        scenario=first.scenario,
        master_seed=master_seed,
        replications=len(reports),
        config=dict(first.config),
    )
    for m in first.metrics:
        values = [r.value(m.name) for r in reports]
        censored = sum(1 for r in reports if r.get(m.name).censored)
        mean, lo, hi = mean_ci(values)
        agg.metrics.append(AggregateMetric(m.name, mean, lo, hi, m.unit, censored))
    for kind in first.overhead_bits:
        agg.overhead_bits[kind] = sum(r.overhead_bits.get(kind, 0) for r in reports) / len(reports)
    return agg
