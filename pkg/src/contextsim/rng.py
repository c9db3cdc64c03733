"""Deterministic seed derivation and per-subsystem random streams.

One master seed drives everything. Replication seeds come from a
splitmix64-style derivation (an O(1) jump into the splitmix64 output
sequence), and each subsystem inside a run gets its own numpy Generator
seeded from (run_seed, label). Because streams are keyed by label, adding
a new subsystem never perturbs the draws of existing ones.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # splitmix64 golden-ratio increment
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix64(z: int) -> int:
    """splitmix64 finalizer: a bijective avalanche mix on 64 bits."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _fnv1a64(label: str) -> int:
    h = _FNV_OFFSET
    for byte in label.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for replication `index` (0-based) of a run with `master_seed`.

    Equals the (index+1)-th output of splitmix64 started at state
    `master_seed`. The finalizer is a bijection and the internal states
    master+k*gamma are pairwise distinct for k < 2**64, so derived seeds
    never collide for any realistic replication count.
    """
    if index < 0:
        raise ValueError("replication index must be >= 0")
    state = (master_seed + (index + 1) * _GAMMA) & _MASK64
    return _mix64(state)


def derive_seeds(master_seed: int, count: int) -> np.ndarray:
    """Vectorized derive_seed for indices 0..count-1 (uint64 array)."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(master_seed & _MASK64) + idx * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def stream_seed(run_seed: int, label: str) -> int:
    """Seed for the subsystem stream `label` within one run."""
    return _mix64(((run_seed & _MASK64) ^ _fnv1a64(label)) + _GAMMA)


class RngStreams:
    """Lazy per-subsystem numpy Generators for a single run.

    Each label ("channel", "traffic", ...) maps to an independent PCG64
    generator seeded by stream_seed(run_seed, label).
    """

    def __init__(self, run_seed: int):
        self.run_seed = int(run_seed) & _MASK64
        self._streams: dict[str, np.random.Generator] = {}

    def get(self, label: str) -> np.random.Generator:
        gen = self._streams.get(label)
        if gen is None:
            gen = np.random.Generator(np.random.PCG64(stream_seed(self.run_seed, label)))
            self._streams[label] = gen
        return gen
