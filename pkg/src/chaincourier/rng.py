"""Deterministic pseudo-random number generation.

Simulation state must replay bit-for-bit across runs and machines, so the
whole package draws randomness from one small, fully specified generator
(SplitMix64) instead of Python's Mersenne Twister.  Subsystems (world
generation, block creator draws, spawn placement, each bot) get independent
streams derived from the scenario seed so that adding a consumer never
perturbs the draws of another.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF

# Stream tags for deriving independent substreams from one scenario seed.
STREAM_WORLD = 0x57524C44  # "WRLD"
STREAM_BLOCKS = 0x424C4B53  # "BLKS"
STREAM_SPAWN = 0x5350574E  # "SPWN"
STREAM_BOTS = 0x424F5453  # "BOTS"


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, tag: int, index: int = 0) -> int:
    """Derive a substream seed from (seed, tag, index), stable across runs."""
    return _mix((seed & MASK64) ^ _mix(tag & MASK64) ^ _mix((index * 0x9E3779B97F4A7C15) & MASK64))


class SplitMix64:
    """64-bit SplitMix generator with a handful of convenience draws."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        return _mix(self.state)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        limit = MASK64 - (MASK64 + 1) % n
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % n

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def choice(self, seq):
        if not seq:
            raise IndexError("choice from empty sequence")
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        """Fisher-Yates shuffle in place."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]
