"""Deterministic PRNG used by every seeded operation in the toolkit.

splitmix64 with 128-bit multiply-shift reduction for bounded integers, so
plans, manifests, and subset draws are bit-identical for a given seed in any
implementation language (the reduction and the float convention below use
only integer ops plus one exact IEEE-754 scale).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream over a 64-bit seed."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via (u64 * bound) >> 64."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return (self.next_u64() * bound) >> 64

    def uniform(self) -> float:
        """Float in [0, 1) from the top 53 bits (exact in IEEE-754 doubles)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, high index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n) (partial Fisher-Yates, draw order)."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} from {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def derive_seed(seed: int, salt: int) -> int:
    """Per-item substream seed: (seed XOR salt) pushed through one splitmix64 step."""
    return SplitMix64((seed ^ salt) & MASK64).next_u64()
