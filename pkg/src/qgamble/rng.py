"""Seeded random streams.

All randomness in the package comes from a :class:`RandomStream` handed in by
the caller. Concurrent consumers each get their own stream, derived from a
master seed as ``master_seed ^ i``.
"""

from __future__ import annotations

import numpy as np

_U64 = (1 << 64) - 1


class RandomStream:
    """A PCG64 stream that counts how many uniforms it has handed out."""

    def __init__(self, seed: int):
        if not 0 <= seed <= _U64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self.draws = 0

    def random(self) -> float:
        """One uniform draw on [0, 1)."""
        self.draws += 1
        return float(self._gen.random())

    def random_array(self, n: int) -> np.ndarray:
        # Same values as n successive calls to random().
        self.draws += n
        return self._gen.random(n)

    def derive(self, i: int) -> RandomStream:
        return derive_stream(self.seed, i)


def derive_stream(master_seed: int, i: int) -> RandomStream:
    """Stream ``i`` of a family rooted at ``master_seed``."""
    return RandomStream((master_seed ^ i) & _U64)
