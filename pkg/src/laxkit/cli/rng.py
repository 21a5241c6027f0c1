"""splitmix64: the 64-bit generator behind every seeded sample in the CLI.

Portable by construction (pure integer arithmetic), so a seed gives the same
samples on every platform.  ``split`` derives an independent child stream.
"""

from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        if not 0 <= int(seed) <= MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.state = int(seed)

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self, lo=0.0, hi=1.0) -> float:
        # top 53 bits -> [0, 1)
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)

    def complex(self, scale=1.0) -> complex:
        return complex(self.uniform(-scale, scale), self.uniform(-scale, scale))

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())

    def numpy(self) -> np.random.Generator:
        """numpy Generator seeded from this stream (PCG64 is itself platform independent)."""
        return np.random.default_rng(self.next_u64())
