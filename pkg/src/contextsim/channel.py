"""On-off erasure channel with collision resolution over F orthogonal channels.

Each device independently has a connection to the edge node with
probability 1-epsilon in a given slot (one radio per device, so the draw
is shared across whatever that device transmits in the slot). Among the
connected transmissions that share a channel, exactly one succeeds only
if it is alone; two or more collide. Erased transmissions never collide
with anything: they simply do not reach the edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, SimulationLogicError


class Outcome(Enum):
    DELIVERED = "delivered"
    ERASED = "erased"
    COLLIDED = "collided"


@dataclass(frozen=True)
class ChannelConfig:
    num_channels: int = 2
    erasure_prob: float = 0.5
    # per_channel_erasure=True redraws connectivity per channel instead of
    # per device; off by default (a device has one radio).
    per_channel_erasure: bool = False

    def validate(self):
        if self.num_channels < 1:
            raise ConfigurationError(f"channel.num_channels must be >= 1, got {self.num_channels}")
        if not 0.0 <= self.erasure_prob <= 1.0:
            raise ConfigurationError(
                f"channel.erasure_prob must be in [0, 1], got {self.erasure_prob}"
            )


@dataclass(frozen=True)
class TxAttempt:
    device: int
    channel: int
    payload_gen_slot: int = 0


def sample_connectivity(rng: np.random.Generator, num_devices: int, erasure_prob: float) -> np.ndarray:
    """Boolean array: device i is connected this slot with prob 1-epsilon."""
    if num_devices == 0:
        return np.zeros(0, dtype=bool)
    return rng.random(num_devices) >= erasure_prob


def resolve_channels(channels: np.ndarray, connected: np.ndarray, num_channels: int) -> np.ndarray:
    """Vectorized collision resolution for one slot.

    channels[i] is the channel index of attempt i, connected[i] whether the
    attempting device has a connection. Returns an Outcome value per attempt.
    """
    channels = np.asarray(channels)
    connected = np.asarray(connected, dtype=bool)
    if channels.size and (channels.min() < 0 or channels.max() >= num_channels):
        raise SimulationLogicError("attempt references an invalid channel index")
    outcomes = np.empty(channels.shape, dtype=object)
    outcomes[~connected] = Outcome.ERASED
    if connected.any():
        live = channels[connected]
        per_channel = np.bincount(live, minlength=num_channels)
        alone = per_channel[live] == 1
        idx = np.flatnonzero(connected)
        outcomes[idx[alone]] = Outcome.DELIVERED
        outcomes[idx[~alone]] = Outcome.COLLIDED
    return outcomes


def resolve_slot(attempts: list[TxAttempt], connectivity: np.ndarray, config: ChannelConfig) -> list[Outcome]:
    """Object-level wrapper over resolve_channels for explicit attempt lists.

    connectivity is indexed by device id. Raises SimulationLogicError if a
    device appears twice (a device transmits at most once per slot).
    """
    devices = [a.device for a in attempts]
    if len(set(devices)) != len(devices):
        raise SimulationLogicError("duplicate attempt: a device transmits at most once per slot")
    channels = np.array([a.channel for a in attempts], dtype=int)
    connected = np.array([bool(connectivity[a.device]) for a in attempts], dtype=bool)
    return list(resolve_channels(channels, connected, config.num_channels))
