"""Seeded, platform-independent random stream.

SplitMix64: the state advances by a fixed odd constant and each output is the
state pushed through two xor-shift-multiply rounds. Everything is done on
Python ints masked to 64 bits, so the sequence for a given seed is the same
on every platform and every Python build.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)


class RngStream:
    """Single-owner pseudo-random stream. Not safe to share between threads."""

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int = 0):
        self.seed = seed & _MASK
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits of the next output."""
        return (self.next_u64() >> 11) * _INV_2_53

    def bit(self) -> int:
        return self.next_u64() >> 63

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection so there is no modulo bias."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def choice_index(self, probs: Sequence[float]) -> int:
        """Inverse-CDF draw over ``probs`` in ascending index order.

        Returns the first index whose running sum exceeds the uniform draw.
        The running sum only steps up at positive entries, so zero-probability
        outcomes are never returned; if rounding leaves the total short of
        the draw, the last positive entry is returned.
        """
        p = np.asarray(probs, dtype=np.float64)
        cdf = np.cumsum(p)
        u = self.uniform()
        i = int(np.searchsorted(cdf, u, side="right"))
        if i < p.shape[0]:
            return i
        pos = np.flatnonzero(p > 0)
        if pos.size == 0:
            raise ValueError("distribution has no positive entries")
        return int(pos[-1])

    def spawn(self) -> "RngStream":
        """Independent child stream seeded from this one."""
        return RngStream(self.next_u64())

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"
