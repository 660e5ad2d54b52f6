"""Deterministic 64-bit generator used wherever instance data is synthesized.

Elevations and generated coordinates must be bit-stable across platforms and
Python versions, so instead of random.Random (whose uniform() is stable too,
but whose internal state layout we do not want to commit to in file-format
docs) we use the well-known splitmix64 sequence: a counter-based generator
with a public specification that is trivial to reimplement in any language.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """splitmix64 stream seeded with an arbitrary integer."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform float in [lo, hi) with 53-bit resolution."""
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u * 2.0 ** -53)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (both inclusive)."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        # Rejection sampling to avoid modulo bias.
        limit = (MASK64 + 1) - (MASK64 + 1) % span
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + u % span
