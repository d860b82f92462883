"""Seeded random streams.

Every run draws from numpy's Philox-4x64-10 counter-based bit generator, so a
given seed reproduces the same run on any platform numpy supports.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def randbits(rng: np.random.Generator, bits: int) -> int:
    """Uniform integer in [0, 2^bits), exact for any width."""
    if bits <= 0:
        return 0
    raw = int.from_bytes(rng.bytes((bits + 7) // 8), "little")
    return raw & ((1 << bits) - 1)


def randbelow(rng: np.random.Generator, bound: int) -> int:
    return int(rng.integers(bound))
