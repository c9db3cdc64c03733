"""Per-device energy storage, consumption, harvesting, depletion.

All energies are normalized to the on-board storage capacity (1.0).
Costs are charged per transmission interval (one slot): 1% for sensing
plus computing, 10% for communicating, 0.07% for wake-up-receiver
listening. An activity whose cost exceeds the current level is refused
outright; the level never goes negative. A device that cannot even
afford WuR listening counts as depleted for every purpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError


class Activity(Enum):
    SENSE = "sense"
    COMMUNICATE = "communicate"
    WUR_LISTEN = "wur_listen"
    TASK_TX = "task_tx"


@dataclass(frozen=True)
class ConsumptionProfile:
    sense_compute: float = 0.01      # fraction of capacity per interval
    communicate: float = 0.10
    wur_listen: float = 0.0007
    e0_per_tx: float = 1.0           # task scenario energy unit per poll

    def cost(self, activity: Activity) -> float:
        return {
            Activity.SENSE: self.sense_compute,
            Activity.COMMUNICATE: self.communicate,
            Activity.WUR_LISTEN: self.wur_listen,
            Activity.TASK_TX: self.e0_per_tx,
        }[activity]

    def validate(self):
        for name in ("sense_compute", "communicate", "wur_listen", "e0_per_tx"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"energy.{name} must be >= 0")


@dataclass(frozen=True)
class HarvestModel:
    kind: str = "bernoulli"          # "none" or "bernoulli"
    rate: float = 0.02               # arrival probability per slot
    quantum: float = 0.01            # energy per arrival

    def validate(self):
        if self.kind not in ("none", "bernoulli"):
            raise ConfigurationError(f"energy.harvest kind must be none|bernoulli, got {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ConfigurationError(f"energy.harvest_rate must be in [0, 1], got {self.rate}")
        if self.quantum < 0:
            raise ConfigurationError(f"energy.harvest_quantum must be >= 0, got {self.quantum}")


class EnergyState:
    """Mutable energy store for one device. capacity is fixed at 1.0."""

    __slots__ = ("level", "capacity")

    def __init__(self, level: float = 1.0, capacity: float = 1.0):
        if not 0.0 <= level <= capacity:
            raise ConfigurationError(f"energy level must be in [0, {capacity}], got {level}")
        self.level = float(level)
        self.capacity = float(capacity)

    def consume(self, activity: Activity, profile: ConsumptionProfile) -> bool:
        """Charge the activity's cost. Returns False (refused) if the level
        cannot cover it; the level is then left unchanged."""
        cost = profile.cost(activity)
        if self.level < cost:
            return False
        self.level -= cost
        return True

    def harvest(self, rng: np.random.Generator, model: HarvestModel) -> None:
        if model.kind == "none" or model.quantum == 0.0:
            return
        if rng.random() < model.rate:
            self.level = min(self.capacity, self.level + model.quantum)

    def depleted(self, profile: ConsumptionProfile) -> bool:
        """Below the WuR listening cost the device is dead for all purposes."""
        return self.level < profile.wur_listen

    def __repr__(self):
        return f"EnergyState(level={self.level:.6f})"


class EnergyBank:
    """Vectorized energy state for a fleet of devices (event scenario).

    Keeps the same refusal semantics as EnergyState but operates on the
    whole fleet per slot with numpy masks.
    """

    def __init__(self, num_devices: int, profile: ConsumptionProfile, harvest: HarvestModel):
        self.levels = np.ones(num_devices)
        self.profile = profile
        self.harvest_model = harvest
        self.consumed_total = np.zeros(num_devices)

    def harvest(self, rng: np.random.Generator) -> None:
        model = self.harvest_model
        if model.kind == "none" or model.quantum == 0.0:
            return
        arrivals = rng.random(self.levels.size) < model.rate
        np.minimum(self.levels + arrivals * model.quantum, 1.0, out=self.levels)

    def try_consume(self, mask: np.ndarray, activity: Activity) -> np.ndarray:
        """Charge `activity` to every device in `mask` that can afford it.

        Returns the boolean mask of devices actually charged.
        """
        cost = self.profile.cost(activity)
        ok = mask & (self.levels >= cost)
        self.levels[ok] -= cost
        self.consumed_total[ok] += cost
        return ok

    def depleted(self) -> np.ndarray:
        return self.levels < self.profile.wur_listen
