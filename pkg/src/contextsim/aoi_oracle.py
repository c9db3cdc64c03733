"""Exact references for the AoI simulator.

Two independent machineries live here:

* A stationary Markov-chain solver for the single-device threshold
  policy (states = (aoi clamped at a_max, buffer age)), giving the exact
  long-run AAoI the simulator must approach.

* Exact finite-horizon means for the two-device, one-channel instance,
  computed by exhaustive weighted sums over every erasure/generation
  pattern. The optimal policy consumes two erasure bits per slot, so a
  12-slot run spans exactly 2**24 equally likely patterns; generation
  randomness (p = 1/2) adds two more bits per slot for the threshold
  policy. All weights are powers of two, so plain integer arithmetic is
  exact. A dynamic program over the joint state carries the weighted
  sums; `enumerate_optimal_mean_aaoi` re-derives the optimal number by
  direct enumeration of all patterns as a cross-check.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError

# ---------------------------------------------------------------------------
# stationary chain, N = 1, F = 1, threshold policy


def threshold_chain_aaoi(threshold: int, gen_prob: float, erasure_prob: float,
                         a_max: int = 50, tol: float = 1e-13,
                         max_iters: int = 200_000) -> float:
    """Exact stationary AAoI of the single-device threshold policy.

    State is (aoi, buffer age), aoi clamped at a_max, age -1 meaning an
    empty buffer. Per slot: a fresh packet arrives w.p. p (replacing the
    buffer); it is transmitted in that same slot iff aoi exceeds the
    threshold, and delivered w.p. 1 - epsilon. Held-back packets age in
    the buffer but are not retried. The stationary distribution is found
    by power iteration on the sparse transition structure (at most four
    successors per state).
    """
    if a_max < 2:
        raise ConfigurationError(f"a_max must be >= 2, got {a_max}")
    p, eps = float(gen_prob), float(erasure_prob)
    ages = a_max + 1  # buffer ages: -1 (empty) plus 0..a_max-1 stored as 1..a_max

    def sid(aoi, age):
        return (aoi - 1) * (ages + 1) + (age + 1)

    n_states = a_max * (ages + 1)
    src, dst, wgt = [], [], []

    def add(s, aoi2, age2, w):
        if w > 0.0:
            src.append(s)
            dst.append(sid(min(aoi2, a_max), min(age2, a_max - 1) if age2 >= 0 else -1))
            wgt.append(w)

    for aoi in range(1, a_max + 1):
        for age in range(-1, a_max):
            s = sid(aoi, age)
            # generation draw first; only the fresh (age 0) packet may transmit
            if aoi > threshold:
                add(s, 1, -1, p * (1.0 - eps))          # delivered fresh => aoi 1
                add(s, aoi + 1, 1, p * eps)             # erased, packet ages
            else:
                add(s, aoi + 1, 1, p)                   # held back, packet ages
            add(s, aoi + 1, age + 1 if age >= 0 else -1, 1.0 - p)

    src = np.array(src)
    dst = np.array(dst)
    wgt = np.array(wgt)
    assert np.allclose(np.bincount(src, weights=wgt, minlength=n_states), 1.0)

    pi = np.full(n_states, 1.0 / n_states)
    for _ in range(max_iters):
        # lazy step keeps the iteration convergent even for periodic chains
        # (e.g. the deterministic cycle at p = 1, eps = 0)
        nxt = 0.5 * pi + 0.5 * np.bincount(dst, weights=pi[src] * wgt, minlength=n_states)
        if np.abs(nxt - pi).sum() < tol:
            pi = nxt
            break
        pi = nxt
    pi /= pi.sum()
    aoi_values = np.arange(1, a_max + 1).repeat(ages + 1)
    return float(pi @ aoi_values)


def threshold_renewal_aaoi(threshold: int, gen_prob: float, erasure_prob: float) -> float:
    """Closed-form stationary AAoI for the same single-device system.

    The AoI path is a renewal sawtooth: a deterministic ramp 1..threshold
    followed by a geometric number of contention slots, each resetting
    w.p. r = p(1-eps). With L the cycle length, AAoI = E[L(L+1)/2]/E[L].
    Independent of the chain solver above; used to validate it.
    """
    r = gen_prob * (1.0 - erasure_prob)
    if r <= 0.0:
        return float("inf")
    t = float(threshold)
    mean_l = t + 1.0 / r
    mean_l2 = t * t + 2.0 * t / r + (2.0 - r) / (r * r)
    return (mean_l2 + mean_l) / (2.0 * mean_l)


# ---------------------------------------------------------------------------
# exact finite-horizon means, N = 2, F = 1, p = eps = 1/2


def _warmup_slots(horizon: int) -> int:
    return int(0.1 * horizon)


def exact_optimal_mean_aaoi(horizon: int = 12) -> tuple[int, int]:
    """Exact sum of counted AoI over all 2**(2*horizon) erasure patterns.

    Returns (total, denominator): mean AAoI = total / (denominator *
    counted_slots * 2). The optimal scheduler polls the connected device
    with the larger AoI (ties to device 0) and polled devices transmit a
    freshly generated packet, so AoI resets to 1.
    """
    warmup = _warmup_slots(horizon)
    size = 14  # aoi values 1..13 for horizon <= 12
    w = np.zeros((size, size), dtype=np.int64)
    acc = np.zeros((size, size), dtype=np.int64)
    w[1, 1] = 1
    a1, a2 = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    aoisum = (a1 + a2).ravel()

    maps = []
    for e1 in (0, 1):
        for e2 in (0, 1):
            deliver1 = (e1 == 1) & ((a1 >= a2) | (e2 == 0))
            deliver2 = (e2 == 1) & ~deliver1
            n1 = np.where(deliver1, 1, np.minimum(a1 + 1, size - 1))
            n2 = np.where(deliver2, 1, np.minimum(a2 + 1, size - 1))
            maps.append((n1 * size + n2).ravel())

    for t in range(horizon):
        counted = t >= warmup
        wf, af = w.ravel(), acc.ravel()
        contrib = af + (wf * aoisum if counted else 0)
        wn = np.zeros(size * size, dtype=np.int64)
        an = np.zeros(size * size, dtype=np.int64)
        for idx in maps:
            np.add.at(wn, idx, wf)
            np.add.at(an, idx, contrib)
        w = wn.reshape(size, size)
        acc = an.reshape(size, size)
    return int(acc.sum()), 4 ** horizon


def enumerate_optimal_mean_aaoi(horizon: int = 12, chunk_bits: int = 20) -> tuple[int, int]:
    """Direct enumeration of all 2**(2*horizon) erasure patterns.

    Independent of the dynamic program above: every pattern is simulated
    explicitly (vectorized in chunks) and the counted AoI summed with
    integer arithmetic.
    """
    warmup = _warmup_slots(horizon)
    total_bits = 2 * horizon
    n_patterns = 1 << total_bits
    chunk = min(1 << chunk_bits, n_patterns)
    total = 0
    for start in range(0, n_patterns, chunk):
        ids = np.arange(start, start + chunk, dtype=np.uint64)
        aoi1 = np.ones(chunk, dtype=np.int64)
        aoi2 = np.ones(chunk, dtype=np.int64)
        acc = np.zeros(chunk, dtype=np.int64)
        for t in range(horizon):
            if t >= warmup:
                acc += aoi1 + aoi2
            e1 = (ids >> np.uint64(2 * t)) & np.uint64(1)
            e2 = (ids >> np.uint64(2 * t + 1)) & np.uint64(1)
            c1 = e1.astype(bool)
            c2 = e2.astype(bool)
            deliver1 = c1 & ((aoi1 >= aoi2) | ~c2)
            deliver2 = c2 & ~deliver1
            aoi1 = np.where(deliver1, 1, aoi1 + 1)
            aoi2 = np.where(deliver2, 1, aoi2 + 1)
        total += int(acc.sum())
    return total, n_patterns


def exact_threshold_mean_aaoi(threshold: int, horizon: int = 12) -> tuple[int, int]:
    """Exact weighted sum for the two-device threshold policy, p = eps = 1/2.

    Sums over all generation and erasure patterns (four bits per slot) by
    dynamic programming on (aoi1, aoi2); every pattern has integer weight
    1 out of 16**horizon. A device transmits iff it generated this slot
    and its AoI exceeds the threshold, so delivered packets are fresh and
    buffer age never enters the state.
    """
    warmup = _warmup_slots(horizon)
    size = horizon + 2  # aoi 1..horizon+1
    a1, a2 = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    aoisum = (a1 + a2).ravel()

    maps = []
    for g1 in (0, 1):
        for g2 in (0, 1):
            tx1 = (g1 == 1) & (a1 > threshold)
            tx2 = (g2 == 1) & (a2 > threshold)
            for e1 in (0, 1):
                for e2 in (0, 1):
                    live1 = tx1 & (e1 == 1)
                    live2 = tx2 & (e2 == 1)
                    deliver1 = live1 & ~live2
                    deliver2 = live2 & ~live1
                    na1 = np.where(deliver1, 1, np.minimum(a1 + 1, size - 1))
                    na2 = np.where(deliver2, 1, np.minimum(a2 + 1, size - 1))
                    maps.append((na1 * size + na2).ravel())

    w = np.zeros(size * size, dtype=np.int64)
    acc = np.zeros(size * size, dtype=np.int64)
    w[1 * size + 1] = 1
    for t in range(horizon):
        counted = t >= warmup
        contrib = acc + (w * aoisum if counted else 0)
        wn = np.zeros(size * size, dtype=np.int64)
        an = np.zeros(size * size, dtype=np.int64)
        for idx in maps:
            np.add.at(wn, idx, w)
            np.add.at(an, idx, contrib)
        w, acc = wn, an
    return int(acc.sum()), 16 ** horizon


def enumerate_threshold_mean_aaoi(threshold: int, horizon: int) -> tuple[int, int]:
    """Direct joint enumeration (4 bits per slot); only sane for small horizons."""
    warmup = _warmup_slots(horizon)
    total_bits = 4 * horizon
    n_patterns = 1 << total_bits
    ids = np.arange(n_patterns, dtype=np.uint64)
    aoi = [np.ones(n_patterns, dtype=np.int64) for _ in range(2)]
    acc = np.zeros(n_patterns, dtype=np.int64)
    for t in range(horizon):
        if t >= warmup:
            acc += aoi[0] + aoi[1]
        bits = [(ids >> np.uint64(4 * t + j)) & np.uint64(1) for j in range(4)]
        gen = [bits[0].astype(bool), bits[1].astype(bool)]
        conn = [bits[2].astype(bool), bits[3].astype(bool)]
        live = [gen[i] & conn[i] & (aoi[i] > threshold) for i in range(2)]
        deliver = [live[0] & ~live[1], live[1] & ~live[0]]
        for i in range(2):
            aoi[i] = np.where(deliver[i], 1, aoi[i] + 1)
    return int(acc.sum()), n_patterns


def mean_aaoi(total: int, denominator: int, horizon: int) -> float:
    counted = horizon - _warmup_slots(horizon)
    return total / (denominator * counted * 2)
