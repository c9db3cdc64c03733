import json
from pathlib import Path

import numpy as np
import pytest

from contextsim.errors import DecodeError, EncodeError, FramingError, ProtocolError
from contextsim.protocol import (
    CONTEXT_UPDATE_BITS,
    REGISTRATION_BITS,
    ContextUpdate,
    FrameKind,
    OverheadTrace,
    RegistrationRecord,
    SensingMode,
    decode_context_update,
    decode_registration,
    encode_context_update,
    encode_registration,
    overhead_bits,
    quantize_energy,
    saturating_age,
)

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "golden"


def _registration_from_fields(fields):
    return RegistrationRecord(**fields)


def _update_from_fields(fields):
    fields = dict(fields)
    mode = fields.pop("sensing_mode")
    lookup = {
        "passive": SensingMode.PASSIVE,
        "event-driven": SensingMode.EVENT_DRIVEN,
        "periodic": SensingMode.PERIODIC,
    }
    return ContextUpdate(sensing_mode=lookup[mode], **fields)


def test_golden_registration_frames():
    data = json.loads((GOLDEN_DIR / "registration.json").read_text())
    for entry in data["frames"]:
        record = _registration_from_fields(entry["fields"])
        frame = encode_registration(record)
        assert frame.hex() == entry["hex"], entry["note"]
        assert decode_registration(bytes.fromhex(entry["hex"])) == record


def test_golden_context_update_frames():
    data = json.loads((GOLDEN_DIR / "context_update.json").read_text())
    for entry in data["frames"]:
        update = _update_from_fields(entry["fields"])
        frame = encode_context_update(update)
        assert frame.hex() == entry["hex"], entry["note"]
        assert decode_context_update(bytes.fromhex(entry["hex"])) == update


def test_registration_roundtrip_randomized():
    rng = np.random.default_rng(2024)
    for _ in range(2000):
        record = RegistrationRecord(
            device_id=int(rng.integers(0, 1 << 16)),
            storage_capacity_code=int(rng.integers(0, 256)),
            processor_speed_idx=int(rng.integers(0, 12)),
            tx_power_idx=int(rng.integers(0, 12)),
            memory_size_code=int(rng.integers(0, 256)),
            sensor_mask=int(rng.integers(0, 256)),
        )
        assert decode_registration(encode_registration(record)) == record


def test_context_update_roundtrip_randomized():
    rng = np.random.default_rng(99)
    for _ in range(2000):
        update = ContextUpdate(
            device_id=int(rng.integers(0, 1 << 16)),
            energy_level_q=int(rng.integers(0, 128)),
            sensing_mode=SensingMode(int(rng.integers(0, 3))),
            buffer_age_q=int(rng.integers(0, 256)),
            has_packet=bool(rng.integers(0, 2)),
            depleted_warning=bool(rng.integers(0, 2)),
        )
        assert decode_context_update(encode_context_update(update)) == update


def test_frame_lengths_are_constant():
    assert len(encode_registration(RegistrationRecord(0))) == 6
    assert len(encode_context_update(ContextUpdate(0))) == 5


def test_wrong_length_is_framing_error():
    with pytest.raises(FramingError):
        decode_registration(b"\x00" * 5)
    with pytest.raises(FramingError):
        decode_context_update(b"\x00" * 6)


def test_out_of_range_index_names_field():
    with pytest.raises(EncodeError, match="processor_speed_idx"):
        encode_registration(RegistrationRecord(0, processor_speed_idx=12))
    with pytest.raises(EncodeError, match="tx_power_idx"):
        encode_registration(RegistrationRecord(0, tx_power_idx=15))
    with pytest.raises(EncodeError, match="device_id"):
        encode_registration(RegistrationRecord(1 << 16))
    with pytest.raises(EncodeError, match="energy_level_q"):
        encode_context_update(ContextUpdate(0, energy_level_q=128))


def test_reserved_and_pad_bits_rejected():
    with pytest.raises(DecodeError):
        decode_context_update(bytes.fromhex("0000000001"))  # pad bit set
    with pytest.raises(DecodeError):
        decode_context_update(bytes.fromhex("0000000010"))  # reserved flag set


def test_registration_fuzz_never_panics():
    rng = np.random.default_rng(5)
    decoded = 0
    rejected = 0
    for _ in range(5000):
        frame = rng.bytes(6)
        try:
            record = decode_registration(frame)
        except ProtocolError:
            rejected += 1
        else:
            decoded += 1
            assert encode_registration(record) == frame
    assert decoded and rejected


def test_context_update_fuzz_never_panics():
    rng = np.random.default_rng(6)
    decoded = 0
    rejected = 0
    for _ in range(5000):
        frame = rng.bytes(5)
        try:
            update = decode_context_update(frame)
        except ProtocolError:
            rejected += 1
        else:
            decoded += 1
            assert encode_context_update(update) == frame
    assert decoded and rejected


def test_energy_quantizer():
    assert quantize_energy(1.0) == 127
    assert quantize_energy(0.5) == 63  # floor(0.5 * 127)
    assert quantize_energy(0.0) == 0
    with pytest.raises(EncodeError):
        quantize_energy(1.5)
    # quantization error bounded by one step
    for level in np.linspace(0, 1, 101):
        q = quantize_energy(float(level))
        assert abs(level - q / 127) <= 1 / 127 + 1e-12


def test_saturating_age():
    assert saturating_age(0) == 0
    assert saturating_age(255) == 255
    assert saturating_age(10_000) == 255
    with pytest.raises(EncodeError):
        saturating_age(-1)


def test_overhead_accounting():
    trace = OverheadTrace()
    assert overhead_bits(trace) == 0
    trace.record(FrameKind.REGISTRATION)
    trace.record(FrameKind.CONTEXT_UPDATE, 10)
    assert overhead_bits(trace) == REGISTRATION_BITS + 10 * CONTEXT_UPDATE_BITS
    assert overhead_bits(trace) == 448
    by_kind = trace.bits_by_kind()
    assert by_kind["registration"] == 48
    assert by_kind["context_update"] == 400


def test_overhead_additive_across_devices():
    a = OverheadTrace()
    b = OverheadTrace()
    a.record(FrameKind.WUS, 3)
    b.record(FrameKind.POLL, 2)
    combined = OverheadTrace()
    combined.record(FrameKind.WUS, 3)
    combined.record(FrameKind.POLL, 2)
    assert overhead_bits(combined) == overhead_bits(a) + overhead_bits(b)
