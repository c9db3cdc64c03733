"""Bit-exact codec for the two-step context protocol.

Step one is a 6-byte registration frame carrying hardware constants that
never change over a device's life (sent once when joining). Step two is
a 5-byte context-update frame carrying the application state that the
edge needs refreshed: quantized energy level, sensing mode, and the age
of the oldest buffered packet.

Wire layouts (MSB-first within each frame; see docs/wire-format.md):

  registration, 48 bits:
    device_id:16 | storage_capacity_code:8 | processor_speed_idx:4 |
    tx_power_idx:4 | memory_size_code:8 | sensor_mask:8

  context update, 36 bits padded to 40:
    device_id:16 | energy_level_q:7 | sensing_mode:2 | buffer_age_q:8 |
    flags:3 (has_packet, depleted_warning, reserved=0) | pad:4 (zero)

Downlink wake-up signals, polls and uplink ready-to-send frames share a
3-byte layout: device_id:16 | opcode:8.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DecodeError, EncodeError, FramingError

# Operating-point lookup tables kept by both device and edge. A frame
# carries only the 4-bit index. Indices beyond the table are invalid even
# though they fit the field.
PROCESSOR_SPEEDS_MHZ = (8, 16, 32, 48, 64, 80, 120, 160, 240, 320, 480, 1000)
TX_POWERS_DBM = (-20, -16, -12, -8, -4, 0, 2, 4, 6, 8, 10, 14)

# storage_capacity_code / memory_size_code are logarithmic: code k means
# 2**k bytes, so the 8-bit code spans 1 B .. 2**255 B.

REGISTRATION_BYTES = 6
CONTEXT_UPDATE_BYTES = 5
CONTROL_BYTES = 3

REGISTRATION_BITS = REGISTRATION_BYTES * 8
CONTEXT_UPDATE_BITS = CONTEXT_UPDATE_BYTES * 8
CONTROL_BITS = CONTROL_BYTES * 8

ENERGY_QUANT_MAX = 127  # 7-bit quantizer


class SensingMode(Enum):
    PASSIVE = 0
    EVENT_DRIVEN = 1
    PERIODIC = 2


class FrameKind(Enum):
    REGISTRATION = "registration"
    CONTEXT_UPDATE = "context_update"
    WUS = "wus"
    POLL = "poll"
    RTS = "rts"


FRAME_BITS = {
    FrameKind.REGISTRATION: REGISTRATION_BITS,
    FrameKind.CONTEXT_UPDATE: CONTEXT_UPDATE_BITS,
    FrameKind.WUS: CONTROL_BITS,
    FrameKind.POLL: CONTROL_BITS,
    FrameKind.RTS: CONTROL_BITS,
}


def _check_range(name: str, value: int, bits: int, table_len: int | None = None,
                 error=EncodeError):
    if not isinstance(value, int) or isinstance(value, bool):
        raise error(f"{name} must be an integer, got {value!r}")
    if not 0 <= value < (1 << bits):
        raise error(f"{name} out of range for {bits}-bit field: {value}")
    if table_len is not None and value >= table_len:
        raise error(f"{name} index {value} outside lookup table of {table_len} entries")


@dataclass(frozen=True)
class RegistrationRecord:
    device_id: int
    storage_capacity_code: int = 0
    processor_speed_idx: int = 0
    tx_power_idx: int = 0
    memory_size_code: int = 0
    sensor_mask: int = 0


@dataclass(frozen=True)
class ContextUpdate:
    device_id: int
    energy_level_q: int = 0
    sensing_mode: SensingMode = SensingMode.PASSIVE
    buffer_age_q: int = 0
    has_packet: bool = False
    depleted_warning: bool = False


def quantize_energy(level: float) -> int:
    """floor(level * 127); quantization error is at most 1/127 of capacity."""
    if not 0.0 <= level <= 1.0:
        raise EncodeError(f"energy level must be in [0, 1], got {level}")
    return int(level * ENERGY_QUANT_MAX)


def saturating_age(age_slots: int) -> int:
    """Clamp a buffer age in slots to the 8-bit wire field."""
    if age_slots < 0:
        raise EncodeError(f"buffer age must be >= 0, got {age_slots}")
    return min(age_slots, 255)


def encode_registration(record: RegistrationRecord) -> bytes:
    _check_range("device_id", record.device_id, 16)
    _check_range("storage_capacity_code", record.storage_capacity_code, 8)
    _check_range("processor_speed_idx", record.processor_speed_idx, 4,
                 len(PROCESSOR_SPEEDS_MHZ))
    _check_range("tx_power_idx", record.tx_power_idx, 4, len(TX_POWERS_DBM))
    _check_range("memory_size_code", record.memory_size_code, 8)
    _check_range("sensor_mask", record.sensor_mask, 8)
    word = record.device_id
    word = (word << 8) | record.storage_capacity_code
    word = (word << 4) | record.processor_speed_idx
    word = (word << 4) | record.tx_power_idx
    word = (word << 8) | record.memory_size_code
    word = (word << 8) | record.sensor_mask
    return word.to_bytes(REGISTRATION_BYTES, "big")


def decode_registration(frame: bytes) -> RegistrationRecord:
    if len(frame) != REGISTRATION_BYTES:
        raise FramingError(
            f"registration frame must be {REGISTRATION_BYTES} bytes, got {len(frame)}"
        )
    word = int.from_bytes(frame, "big")
    record = RegistrationRecord(
        device_id=(word >> 32) & 0xFFFF,
        storage_capacity_code=(word >> 24) & 0xFF,
        processor_speed_idx=(word >> 20) & 0xF,
        tx_power_idx=(word >> 16) & 0xF,
        memory_size_code=(word >> 8) & 0xFF,
        sensor_mask=word & 0xFF,
    )
    _check_range("processor_speed_idx", record.processor_speed_idx, 4,
                 len(PROCESSOR_SPEEDS_MHZ), error=DecodeError)
    _check_range("tx_power_idx", record.tx_power_idx, 4,
                 len(TX_POWERS_DBM), error=DecodeError)
    return record


def encode_context_update(update: ContextUpdate) -> bytes:
    _check_range("device_id", update.device_id, 16)
    _check_range("energy_level_q", update.energy_level_q, 7)
    _check_range("buffer_age_q", update.buffer_age_q, 8)
    if not isinstance(update.sensing_mode, SensingMode):
        raise EncodeError(f"sensing_mode must be a SensingMode, got {update.sensing_mode!r}")
    flags = (int(update.has_packet) << 2) | (int(update.depleted_warning) << 1)
    word = update.device_id
    word = (word << 7) | update.energy_level_q
    word = (word << 2) | update.sensing_mode.value
    word = (word << 8) | update.buffer_age_q
    word = (word << 3) | flags
    word <<= 4  # pad to a byte boundary
    return word.to_bytes(CONTEXT_UPDATE_BYTES, "big")


def decode_context_update(frame: bytes) -> ContextUpdate:
    if len(frame) != CONTEXT_UPDATE_BYTES:
        raise FramingError(
            f"context update frame must be {CONTEXT_UPDATE_BYTES} bytes, got {len(frame)}"
        )
    word = int.from_bytes(frame, "big")
    if word & 0xF:
        raise DecodeError("context update pad bits must be zero")
    word >>= 4
    flags = word & 0x7
    if flags & 0x1:
        raise DecodeError("context update reserved flag bit must be zero")
    mode_value = (word >> 11) & 0x3
    try:
        mode = SensingMode(mode_value)
    except ValueError:
        raise DecodeError(f"invalid sensing_mode value {mode_value}") from None
    return ContextUpdate(
        device_id=(word >> 20) & 0xFFFF,
        energy_level_q=(word >> 13) & 0x7F,
        sensing_mode=mode,
        buffer_age_q=(word >> 3) & 0xFF,
        has_packet=bool(flags & 0x4),
        depleted_warning=bool(flags & 0x2),
    )


def encode_control(kind: FrameKind, device_id: int) -> bytes:
    """WuS / poll / RTS frames: device_id:16 | opcode:8."""
    opcode = {FrameKind.WUS: 0x01, FrameKind.POLL: 0x02, FrameKind.RTS: 0x03}.get(kind)
    if opcode is None:
        raise EncodeError(f"{kind} is not a control frame kind")
    _check_range("device_id", device_id, 16)
    return device_id.to_bytes(2, "big") + bytes([opcode])


class OverheadTrace:
    """Counts every control-plane frame a run sends, split by kind.

    The codec is stateless, so exact bit accounting only needs counts.
    """

    def __init__(self):
        self.counts = {kind: 0 for kind in FrameKind}

    def record(self, kind: FrameKind, count: int = 1):
        self.counts[kind] += count

    def bits_by_kind(self) -> dict[str, int]:
        return {kind.value: self.counts[kind] * FRAME_BITS[kind] for kind in FrameKind}

    def total_bits(self) -> int:
        return sum(self.bits_by_kind().values())


def overhead_bits(trace: OverheadTrace) -> int:
    """Exact control-plane bit count of a run trace."""
    return trace.total_bits()
