"""Deterministic 64-bit random number generation.

Every random quantity in the library (fold shuffles, bootstrap draws) comes
from a SplitMix64 stream, so results are reproducible bit-for-bit across
platforms and Python versions.  Sub-stream seeds are derived with
``mix_seed``; in particular bootstrap ``i`` of a run is seeded with
``mix_seed(base_seed, i)``, which is what lets the eager, lazy, and batched
algorithms consume identical bootstrap samples.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # 2**64 / golden ratio
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _finalize(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def mix_seed(base_seed: int, index: int) -> int:
    """Seed of sub-stream ``index`` of the stream rooted at ``base_seed``."""
    return _finalize((base_seed + (index + 1) * _GAMMA) & _MASK64)


class SplitMix64:
    """SplitMix64 generator (Steele, Lea and Flood's mixing constants)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _finalize(self._state)

    def below(self, n: int) -> int:
        """Uniform draw in [0, n).

        Plain modulo reduction; the bias of at most n / 2**64 is irrelevant
        at the sample sizes used here.
        """
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.next_uint64() % n
