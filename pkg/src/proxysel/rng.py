"""Seed derivation and generator construction.

All randomness goes through numpy's Philox4x64 counter-based generator.
Independent streams are keyed by ``mix(master_seed, index)``, where ``mix`` is
the SplitMix64 finalizer applied to ``master_seed + (index + 1) * 0x9E3779B97F4A7C15``
(mod 2**64). Streams therefore do not depend on the order in which they are
created, and rounds can be computed in any order or in parallel.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(master_seed: int, index: int) -> int:
    if not 0 <= master_seed <= MASK64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return splitmix64(master_seed + (index + 1) * GOLDEN)


def generator(seed: int, stream: int | None = None) -> np.random.Generator:
    key = seed if stream is None else mix(seed, stream)
    return np.random.Generator(np.random.Philox(key=key & MASK64))
