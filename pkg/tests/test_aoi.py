import math

import numpy as np
import pytest

from contextsim.aoi import (
    AoiConfig,
    AoiNetworkState,
    AoiTrace,
    compute_aaoi,
    compute_paoi,
    generate_packets,
    rts_wait,
    schedule_autonomous,
    schedule_optimal,
    schedule_threshold,
    update_aoi,
)
from contextsim.errors import ConfigurationError, MetricError


def make_state(aoi, buf_gen=None):
    state = AoiNetworkState(len(aoi))
    state.aoi[:] = aoi
    if buf_gen is not None:
        state.buf_gen[:] = buf_gen
    return state


def test_config_validation():
    AoiConfig().validate()
    with pytest.raises(ConfigurationError):
        AoiConfig(gen_prob=1.2).validate()
    with pytest.raises(ConfigurationError):
        AoiConfig(policy="alien").validate()
    with pytest.raises(ConfigurationError):
        AoiConfig(num_devices=0).validate()


def test_generate_extremes():
    state = make_state([1, 1, 1])
    generate_packets(state, now=5, gen_draw=np.ones(3), gen_prob=0.0)
    assert (state.buf_gen == -1).all()
    generate_packets(state, now=5, gen_draw=np.random.default_rng(0).random(3), gen_prob=1.0)
    assert (state.buf_gen == 5).all()


def test_generate_replaces_oldest():
    state = make_state([4], buf_gen=[2])
    generate_packets(state, now=7, gen_draw=np.zeros(1), gen_prob=0.5)
    assert state.buf_gen[0] == 7


def test_generation_rate():
    # binomial check: N=32, p=0.4 over 1e4 slots
    rng = np.random.default_rng(17)
    state = make_state([1] * 32)
    generated = 0
    for t in range(10_000):
        state.buf_gen[:] = -1
        generate_packets(state, t, rng.random(32), 0.4)
        generated += int((state.buf_gen >= 0).sum())
    mean_per_slot = generated / 10_000
    sigma = math.sqrt(32 * 0.4 * 0.6 / 10_000)
    assert abs(mean_per_slot - 12.8) < 3 * sigma


def test_optimal_no_connected_devices():
    state = make_state([3, 5])
    devices, channels = schedule_optimal(state, np.array([False, False]), 1, now=0)
    assert devices.size == 0


def test_optimal_picks_highest_aoi():
    state = make_state([5, 3, 9])
    devices, channels = schedule_optimal(state, np.array([True, True, True]), 1, now=4)
    assert devices.tolist() == [2]
    assert channels.tolist() == [0]
    assert state.buf_gen[2] == 4  # on-demand fresh packet


def test_optimal_tie_breaks_to_lowest_id():
    state = make_state([7, 7])
    devices, _ = schedule_optimal(state, np.array([True, True]), 1, now=0)
    assert devices.tolist() == [0]


def test_optimal_takes_top_f_on_distinct_channels():
    state = make_state([4, 9, 6, 1])
    devices, channels = schedule_optimal(state, np.array([True, True, True, True]), 2, now=0)
    assert devices.tolist() == [1, 2]
    assert sorted(channels.tolist()) == [0, 1]


def test_optimal_fewer_connected_than_channels():
    state = make_state([4, 9, 6])
    devices, _ = schedule_optimal(state, np.array([False, True, False]), 2, now=0)
    assert devices.tolist() == [1]


def test_rts_wait_shape():
    cfg = AoiConfig(mini_slots=16, aoi_window=4)  # C = 64
    aoi = np.array([1, 2, 5, 10, 64, 65, 1000])
    waits = rts_wait(aoi, cfg.mini_slots, cfg.wait_constant)
    assert waits.tolist() == [15, 15, 12, 6, 1, 0, 0]
    # never outside the mini-slot window, non-increasing in aoi
    assert (waits < cfg.mini_slots).all()
    assert (np.diff(waits) <= 0).all()


def test_autonomous_single_device_always_transmits():
    cfg = AoiConfig(num_channels=2)
    for aoi in (1, 5, 500):
        for jit in range(cfg.jitter_window):
            state = make_state([aoi], buf_gen=[0])
            devices, channels = schedule_autonomous(
                state, np.array([1]), np.array([jit]), cfg
            )
            assert devices.tolist() == [0]
            assert channels.tolist() == [1]


def test_autonomous_higher_aoi_wins_same_channel():
    cfg = AoiConfig(num_channels=1)
    state = make_state([10, 2], buf_gen=[0, 0])
    # any jitter draw keeps wait(10)+3 <= 9 below wait(2) = 15
    for j0 in range(4):
        for j1 in range(4):
            devices, _ = schedule_autonomous(
                state, np.zeros(2, dtype=int), np.array([j0, j1]), cfg
            )
            assert devices.tolist() == [0]


def test_autonomous_no_packets_is_idle():
    cfg = AoiConfig()
    state = make_state([5, 9])
    devices, _ = schedule_autonomous(state, np.zeros(2, dtype=int), np.zeros(2, dtype=int), cfg)
    assert devices.size == 0


def test_autonomous_unique_winner_is_max_aoi_without_jitter():
    # with J=1 the winner on a channel, when unique, is the unique argmax AoI
    cfg = AoiConfig(num_channels=1, jitter_window=1)
    rng = np.random.default_rng(12)
    for _ in range(300):
        n = int(rng.integers(2, 8))
        aoi = rng.integers(1, 120, size=n)
        state = make_state(aoi, buf_gen=[0] * n)
        devices, _ = schedule_autonomous(
            state, np.zeros(n, dtype=int), np.zeros(n, dtype=int), cfg
        )
        assert devices.size >= 1
        if devices.size == 1:
            winner = devices[0]
            assert aoi[winner] == aoi.max()
            assert (aoi == aoi.max()).sum() >= 1
        else:
            # simultaneous RTS only happens at equal waits
            waits = rts_wait(aoi[devices], cfg.mini_slots, cfg.wait_constant)
            assert np.unique(waits).size == 1


def test_threshold_gates_on_aoi():
    state = make_state([3, 8, 10], buf_gen=[0, 0, -1])
    devices, _ = schedule_threshold(state, np.zeros(3, dtype=int), threshold=5)
    assert devices.tolist() == [1]  # device 2 has no packet, device 0 below


def test_threshold_infinite_silences_network():
    state = make_state([100, 200], buf_gen=[0, 0])
    devices, _ = schedule_threshold(state, np.zeros(2, dtype=int), threshold=10**9)
    assert devices.size == 0


def test_update_aoi_fresh_delivery():
    state = make_state([7], buf_gen=[5])
    update_aoi(state, now=5, delivered_devices=np.array([0]))
    assert state.aoi[0] == 1
    assert state.buf_gen[0] == -1


def test_update_aoi_stale_delivery():
    state = make_state([9], buf_gen=[3])
    update_aoi(state, now=8, delivered_devices=np.array([0]))
    assert state.aoi[0] == 6  # (8 - 3) + 1


def test_update_aoi_no_delivery_increments():
    state = make_state([4, 2])
    update_aoi(state, now=0, delivered_devices=np.array([], dtype=int))
    assert state.aoi.tolist() == [5, 3]


def test_aoi_steps_are_plus_one_or_reset():
    rng = np.random.default_rng(3)
    state = make_state([1, 1, 1])
    for t in range(200):
        generate_packets(state, t, rng.random(3), 0.5)
        before = state.aoi.copy()
        candidates = np.flatnonzero(state.buf_gen >= 0)
        delivered = candidates[rng.random(candidates.size) < 0.3]
        update_aoi(state, t, delivered)
        step = state.aoi - before
        mask = np.zeros(3, dtype=bool)
        mask[delivered] = True
        assert (step[~mask] == 1).all()
        assert (state.aoi >= 1).all()


def sawtooth_trace(period, horizon=100, warmup_frac=0.1):
    """One device delivering a fresh packet every `period` slots."""
    trace = AoiTrace(1, horizon, warmup_frac)
    state = make_state([1])
    for t in range(horizon):
        state.buf_gen[0] = t  # fresh packet each slot
        deliver = np.array([0]) if t % period == 0 else np.array([], dtype=int)
        trace.observe_slot(t, state.aoi)
        peaks = update_aoi(state, t, deliver)
        trace.observe_deliveries(t, deliver, peaks)
    return trace


def test_aaoi_delivery_every_slot():
    assert compute_aaoi(sawtooth_trace(1)) == 1.0


def test_aaoi_delivery_every_second_slot():
    assert compute_aaoi(sawtooth_trace(2)) == 1.5
    assert compute_paoi(sawtooth_trace(2)) == 2.0


def test_paoi_nan_without_deliveries():
    trace = AoiTrace(1, 100)
    state = make_state([1])
    for t in range(100):
        trace.observe_slot(t, state.aoi)
        update_aoi(state, t, np.array([], dtype=int))
    assert math.isnan(compute_paoi(trace))


def test_metrics_require_post_warmup_slots():
    trace = AoiTrace(1, 100)
    with pytest.raises(MetricError):
        compute_aaoi(trace)
    with pytest.raises(MetricError):
        compute_paoi(trace)
