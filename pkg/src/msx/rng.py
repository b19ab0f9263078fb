"""SplitMix64, the seeded generator behind every randomized suite.

The algorithm identifier is ``splitmix64``: state advances by the golden
gamma ``0x9E3779B97F4A7C15`` and each output is the standard two-multiply
finalizer.  Bounded integers use rejection sampling on the full 64-bit
output, so any implementation of the same steps reproduces the same trials.
"""

from __future__ import annotations

from fractions import Fraction

ALGORITHM = "splitmix64"
_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def rational(self, span: int = 5, max_den: int = 4, nonzero: bool = False):
        while True:
            num = self.randint(-span, span)
            if num or not nonzero:
                break
        value = Fraction(num, self.randint(1, max_den))
        return value.numerator if value.denominator == 1 else value

    def fork(self, index: int) -> "SplitMix64":
        """Independent stream for trial ``index``, derived without consuming this one."""
        return SplitMix64(SplitMix64(self.state ^ ((index + 1) * _GAMMA)).next_u64())
