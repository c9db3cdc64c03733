"""Deterministic slotted engine: run and replication drivers.

One slot is 1 ms everywhere. Within a slot every scenario applies its
state transitions in the fixed order

    harvest -> sense/generate -> schedule -> transmit/resolve -> metrics

enforced by a PhaseTracker assertion, so no code can observe a slot in a
half-applied state. A run is strictly single threaded; replications are
independent runs with seeds derived from the master seed and are folded
into mean and 95% confidence interval per metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import ConfigurationError, SimulationLogicError
from .metrics import AggregateReport, MetricsReport, aggregate
from .rng import derive_seed

SLOT_MS = 1.0  # one transmission interval

_PHASES = ("harvest", "generate", "schedule", "transmit", "metrics")


@dataclass
class SimConfig:
    seed: int = 1
    horizon: int = 10_000           # slots
    replications: int = 1
    params: object = None           # scenario-specific config block

    def validate(self):
        if not 0 <= self.seed < (1 << 64):
            raise ConfigurationError(f"seed must fit an unsigned 64-bit value, got {self.seed}")
        if self.horizon < 1:
            raise ConfigurationError(f"horizon must be >= 1, got {self.horizon}")
        if self.replications < 1:
            raise ConfigurationError(f"replications must be >= 1, got {self.replications}")
        if self.params is not None and hasattr(self.params, "validate"):
            self.params.validate()


class PhaseTracker:
    """Asserts the per-slot phase order; phases may be skipped, never revisited."""

    def __init__(self):
        self._idx = len(_PHASES)
        self.slot = -1

    def start_slot(self, t: int):
        if t != self.slot + 1:
            raise SimulationLogicError(f"slot index jumped from {self.slot} to {t}")
        self.slot = t
        self._idx = -1

    def enter(self, phase: str):
        idx = _PHASES.index(phase)
        if idx <= self._idx:
            raise SimulationLogicError(
                f"phase {phase!r} entered after {_PHASES[self._idx]!r} in slot {self.slot}"
            )
        self._idx = idx


ScenarioRunner = Callable[[SimConfig, int], MetricsReport]


def _resolve_runner(scenario) -> ScenarioRunner:
    if callable(scenario):
        return scenario
    # imported lazily so scenario modules can use engine helpers
    if scenario == "aoi":
        from .aoi_scenario import run_aoi_once
        return run_aoi_once
    if scenario == "event":
        from .events_scenario import run_event_once
        return run_event_once
    if scenario == "task":
        from .task_scenario import run_task_once
        return run_task_once
    raise ConfigurationError(f"scenario must be one of aoi|event|task, got {scenario!r}")


def run(config: SimConfig, scenario) -> MetricsReport:
    """One deterministic run: same (seed, config) always gives the same report."""
    config.validate()
    runner = _resolve_runner(scenario)
    return runner(config, config.seed)


def replicate(config: SimConfig, scenario) -> AggregateReport:
    """`replications` independent runs with seeds derived from the master seed."""
    config.validate()
    runner = _resolve_runner(scenario)
    reports = []
    for i in range(config.replications):
        reports.append(runner(config, derive_seed(config.seed, i)))
    return aggregate(reports, master_seed=config.seed)
