"""Age-of-information state tracking, scheduling policies, and metrics.

N devices share F channels. A device's AoI is the number of slots since
the newest update the edge node has received from it was generated; it
grows by one each slot and resets after a delivery at slot t of a packet
generated at slot g to (t - g) + 1 on the following slot.

Three scheduling policies are implemented:

  optimal     the edge ranks the devices whose channel is not erased by
              AoI and polls the top F on distinct channels; polled
              devices generate a fresh packet on demand.
  autonomous  devices contend inside a slot of M mini-slots, waiting
              inversely proportional to their own AoI (plus a small
              uniform jitter to split ties) before sending an RTS on a
              random channel; an RTS is only sent if the channel was
              idle so far, and simultaneous RTS collide.
  threshold   a device transmits in the slot it generates a packet,
              provided its AoI exceeds a fixed threshold, on a random
              channel with no carrier sensing at all. Packets that were
              held back are not retried later (retrying would keep every
              device permanently armed and drive the network into a
              collision-only regime); the threshold and the generation
              probability together thin the contention.

The buffer holds at most one packet; a new generation replaces whatever
was buffered (the newest packet is the one worth keeping for AoI).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, MetricError


@dataclass
class AoiConfig:
    num_devices: int = 32
    num_channels: int = 2
    erasure_prob: float = 0.5
    gen_prob: float = 0.4          # per-slot packet generation probability
    policy: str = "optimal"        # optimal | autonomous | threshold
    threshold: int = 1             # transmit when aoi > threshold
    mini_slots: int = 16           # M: contention mini-slots per slot
    jitter_window: int = 4         # J: RTS tie-break jitter, uniform {0..J-1}
    aoi_window: int = 4            # wait constant C = mini_slots * aoi_window
    warmup_frac: float = 0.1

    @property
    def wait_constant(self) -> int:
        return self.mini_slots * self.aoi_window

    def validate(self):
        if self.num_devices < 1:
            raise ConfigurationError(f"aoi.num_devices must be >= 1, got {self.num_devices}")
        if self.num_channels < 1:
            raise ConfigurationError(f"aoi.num_channels must be >= 1, got {self.num_channels}")
        if not 0.0 <= self.gen_prob <= 1.0:
            raise ConfigurationError(f"aoi.gen_prob must be in [0, 1], got {self.gen_prob}")
        if not 0.0 <= self.erasure_prob <= 1.0:
            raise ConfigurationError(f"aoi.erasure_prob must be in [0, 1], got {self.erasure_prob}")
        if self.policy not in ("optimal", "autonomous", "threshold"):
            raise ConfigurationError(f"aoi.policy must be optimal|autonomous|threshold, got {self.policy!r}")
        if self.threshold < 0:
            raise ConfigurationError(f"aoi.threshold must be >= 0, got {self.threshold}")
        if self.mini_slots < 2:
            raise ConfigurationError(f"aoi.mini_slots must be >= 2, got {self.mini_slots}")
        if self.jitter_window < 1:
            raise ConfigurationError(f"aoi.jitter_window must be >= 1, got {self.jitter_window}")
        if not 0.0 <= self.warmup_frac < 1.0:
            raise ConfigurationError(f"aoi.warmup_frac must be in [0, 1), got {self.warmup_frac}")


class AoiNetworkState:
    """Per-device AoI and single-packet buffers (buf_gen = -1 when empty)."""

    def __init__(self, num_devices: int):
        self.aoi = np.ones(num_devices, dtype=np.int64)
        self.buf_gen = np.full(num_devices, -1, dtype=np.int64)

    @property
    def num_devices(self) -> int:
        return self.aoi.size


def generate_packets(state: AoiNetworkState, now: int, gen_draw: np.ndarray, gen_prob: float):
    """Bernoulli packet generation; a fresh packet replaces the buffer."""
    state.buf_gen[gen_draw < gen_prob] = now


def schedule_optimal(state: AoiNetworkState, connected: np.ndarray, num_channels: int,
                     now: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-F connected devices by AoI (ties to the lowest id), fresh packets.

    Packet generation is on demand: every scheduled device gets a packet
    stamped `now` before transmitting. Returns (device_ids, channels).
    """
    eligible = np.flatnonzero(connected)
    if eligible.size == 0:
        return eligible, eligible
    order = eligible[np.argsort(-state.aoi[eligible], kind="stable")]
    chosen = order[:num_channels]
    state.buf_gen[chosen] = now
    return chosen, np.arange(chosen.size)


def rts_wait(aoi: np.ndarray, mini_slots: int, wait_constant: int) -> np.ndarray:
    """Mini-slots a device waits before its RTS: min(M-1, floor(C / aoi)).

    wait(1) pins to the last mini-slot and devices with aoi > C do not
    wait at all, so higher age always means an earlier (or equal) RTS.
    """
    return np.minimum(mini_slots - 1, wait_constant // aoi)


def schedule_autonomous(state: AoiNetworkState, channel_choice: np.ndarray,
                        jitter: np.ndarray, config: AoiConfig) -> tuple[np.ndarray, np.ndarray]:
    """Resolve one slot of RTS contention.

    Every device holding a packet schedules its RTS at mini-slot
    wait + jitter (clamped to the last mini-slot, so a lone contender
    always gets through). On each channel only the earliest RTS instant
    wins; everyone later senses the channel busy and defers. Two
    contenders hitting the same earliest mini-slot both send (neither
    can hear the other in time) and their data transmissions collide.
    """
    contenders = np.flatnonzero(state.buf_gen >= 0)
    if contenders.size == 0:
        return contenders, contenders
    total = rts_wait(state.aoi[contenders], config.mini_slots, config.wait_constant)
    total = np.minimum(total + jitter[contenders], config.mini_slots - 1)
    chans = channel_choice[contenders]
    senders = []
    for f in range(config.num_channels):
        on_f = chans == f
        if not on_f.any():
            continue
        first = total[on_f].min()
        senders.append(contenders[on_f & (total == first)])
    devices = np.concatenate(senders) if senders else np.empty(0, dtype=np.int64)
    return devices, channel_choice[devices]


def schedule_threshold(state: AoiNetworkState, channel_choice: np.ndarray,
                       threshold: int, now: int) -> tuple[np.ndarray, np.ndarray]:
    """Devices that generated a packet this slot and have aoi > threshold
    transmit blindly on their random channel choice."""
    devices = np.flatnonzero((state.buf_gen == now) & (state.aoi > threshold))
    return devices, channel_choice[devices]


def update_aoi(state: AoiNetworkState, now: int, delivered_devices: np.ndarray):
    """Advance AoI by one slot; deliveries at `now` reset to (now - gen) + 1.

    Delivered packets leave the buffer; everything else ages in place.
    """
    peaks = state.aoi[delivered_devices].copy()
    state.aoi += 1
    if delivered_devices.size:
        state.aoi[delivered_devices] = now - state.buf_gen[delivered_devices] + 1
        state.buf_gen[delivered_devices] = -1
    return peaks


class AoiTrace:
    """Accumulates what the AoI metrics need, past a warm-up window."""

    def __init__(self, num_devices: int, horizon: int, warmup_frac: float = 0.1):
        self.num_devices = num_devices
        self.horizon = horizon
        self.warmup_slots = int(warmup_frac * horizon)
        self.aoi_sum = 0
        self.slots_counted = 0
        self.peak_sum = np.zeros(num_devices)
        self.peak_count = np.zeros(num_devices, dtype=np.int64)
        self.deliveries = 0

    def observe_slot(self, t: int, aoi: np.ndarray):
        """Record the instantaneous AoI of slot t (pre-delivery values)."""
        if t >= self.warmup_slots:
            self.aoi_sum += int(aoi.sum())
            self.slots_counted += 1

    def observe_deliveries(self, t: int, devices: np.ndarray, peaks: np.ndarray):
        self.deliveries += devices.size
        if t >= self.warmup_slots and devices.size:
            np.add.at(self.peak_sum, devices, peaks)
            np.add.at(self.peak_count, devices, 1)


def compute_aaoi(trace: AoiTrace) -> float:
    """Time-and-device average of instantaneous AoI past warm-up."""
    if trace.slots_counted < 1:
        raise MetricError("trace covers no slots past warm-up")
    return trace.aoi_sum / (trace.slots_counted * trace.num_devices)


def compute_paoi(trace: AoiTrace) -> float:
    """Mean AoI immediately before a delivery, averaged over devices.

    Devices with no post-warm-up delivery are left out of the average;
    returns nan if nothing was delivered at all.
    """
    if trace.slots_counted < 1:
        raise MetricError("trace covers no slots past warm-up")
    seen = trace.peak_count > 0
    if not seen.any():
        return math.nan
    return float((trace.peak_sum[seen] / trace.peak_count[seen]).mean())
