"""Seeded splitmix64 stream used everywhere randomness is needed.

splitmix64 is counter-based: output i is a fixed bit-mix of
``seed + i * GOLDEN``, so a stream can hand out whole blocks with one
vectorized uint64 pass and stays reproducible across platforms.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Tiny deterministic RNG; one instance per independent stream."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & _U64_MASK)
        self._count = 0

    def next_u64(self) -> int:
        """Next raw 64-bit word of the stream."""
        self._count += 1
        with np.errstate(over="ignore"):
            z = self._seed + np.uint64(self._count & _U64_MASK) * _GOLDEN
            return int(_mix(np.uint64(z)))

    def uniform(self, n: int) -> np.ndarray:
        """Next ``n`` doubles, uniform in [-1, 1)."""
        counts = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            words = _mix(self._seed + counts * _GOLDEN)
        # 53 high bits -> [0, 1), then map to [-1, 1)
        u01 = (words >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return 2.0 * u01 - 1.0

    def integers(self, n: int, bound: int) -> np.ndarray:
        """Next ``n`` integers in [0, bound); modulo bias is negligible for
        bound << 2**64."""
        counts = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            words = _mix(self._seed + counts * _GOLDEN)
        return (words % np.uint64(bound)).astype(np.int64)
