"""Run loop for the AoI scheduling study and the threshold tuner.

Randomness is split into three streams so policies can be compared under
identical channel draws: "channel" (per-device per-slot connectivity),
"traffic" (packet generation), and "policy" (channel choices and RTS
jitter). All draws are pre-generated as (horizon, N) blocks, which is
equivalent to drawing per slot but much faster.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .aoi import (
    AoiConfig,
    AoiNetworkState,
    AoiTrace,
    compute_aaoi,
    compute_paoi,
    generate_packets,
    schedule_autonomous,
    schedule_optimal,
    schedule_threshold,
    update_aoi,
)
from .channel import resolve_channels, Outcome
from .engine import PhaseTracker, SimConfig
from .metrics import MetricsReport, mean_ci
from .protocol import FrameKind, OverheadTrace
from .rng import RngStreams, derive_seed


def run_aoi_once(config: SimConfig, seed: int) -> MetricsReport:
    params: AoiConfig = config.params if config.params is not None else AoiConfig()
    params.validate()
    n = params.num_devices
    horizon = config.horizon
    streams = RngStreams(seed)

    conn_draw = streams.get("channel").random((horizon, n))
    if params.policy != "optimal":
        gen_draw = streams.get("traffic").random((horizon, n))
    if params.policy == "autonomous":
        policy_rng = streams.get("policy")
        jitter_draw = policy_rng.integers(0, params.jitter_window, size=(horizon, n))
        chan_draw = policy_rng.integers(0, params.num_channels, size=(horizon, n))
    elif params.policy == "threshold":
        chan_draw = streams.get("policy").integers(0, params.num_channels, size=(horizon, n))

    state = AoiNetworkState(n)
    trace = AoiTrace(n, horizon, params.warmup_frac)
    overhead = OverheadTrace()
    phases = PhaseTracker()

    for t in range(horizon):
        phases.start_slot(t)
        connected = conn_draw[t] >= params.erasure_prob

        phases.enter("generate")
        if params.policy != "optimal":
            generate_packets(state, t, gen_draw[t], params.gen_prob)

        phases.enter("schedule")
        if params.policy == "optimal":
            devices, channels = schedule_optimal(state, connected, params.num_channels, t)
            overhead.record(FrameKind.POLL, devices.size)
        elif params.policy == "autonomous":
            devices, channels = schedule_autonomous(state, chan_draw[t], jitter_draw[t], params)
            overhead.record(FrameKind.RTS, devices.size)
        else:
            devices, channels = schedule_threshold(state, chan_draw[t], params.threshold, t)

        phases.enter("transmit")
        if devices.size:
            outcomes = resolve_channels(channels, connected[devices], params.num_channels)
            delivered = devices[outcomes == Outcome.DELIVERED]
        else:
            delivered = devices

        phases.enter("metrics")
        trace.observe_slot(t, state.aoi)
        peaks = update_aoi(state, t, delivered)
        trace.observe_deliveries(t, delivered, peaks)

    report = MetricsReport(
        scenario="aoi",
        seed=seed,
        config={
            "policy": params.policy,
            "N": n,
            "F": params.num_channels,
            "epsilon": params.erasure_prob,
            "p": params.gen_prob,
            "threshold": params.threshold if params.policy == "threshold" else None,
            "horizon": horizon,
        },
    )
    paoi = compute_paoi(trace)
    report.add("aaoi", compute_aaoi(trace), unit="slots")
    report.add("paoi", paoi, unit="slots", censored=np.isnan(paoi))
    report.add("deliveries", trace.deliveries, unit="packets")
    report.overhead_bits = overhead.bits_by_kind()
    return report


def replicated_aaoi(params: AoiConfig, horizon: int, master_seed: int,
                    replications: int) -> tuple[float, float, float]:
    """Mean AAoI with 95% CI over independent replications."""
    values = []
    for i in range(replications):
        cfg = SimConfig(seed=master_seed, horizon=horizon, params=params)
        values.append(run_aoi_once(cfg, derive_seed(master_seed, i)).value("aaoi"))
    return mean_ci(values)


def tune_threshold(params: AoiConfig, grid, horizon: int, master_seed: int,
                   replications: int = 5) -> int:
    """Pick the age threshold minimizing replicated AAoI (ties: smallest)."""
    best_threshold = None
    best_aaoi = np.inf
    for threshold in grid:
        candidate = replace(params, policy="threshold", threshold=int(threshold))
        mean, _, _ = replicated_aaoi(candidate, horizon, master_seed, replications)
        if mean < best_aaoi:
            best_aaoi = mean
            best_threshold = int(threshold)
    return best_threshold


DEFAULT_THRESHOLD_GRID = (1, 2, 3, 5, 8, 12, 16, 24, 32, 48, 64)
