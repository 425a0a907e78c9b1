"""Deterministic 64-bit pseudo-random generator, pinned down to the constant.

Election results must be replayable bit-for-bit by anyone, on any platform,
so nothing here is left to a library default: the state update is splitmix64,
range reduction uses rejection sampling (no modulo bias), and permutations
come from a Fisher-Yates pass that runs from the highest index down.
"""

MASK64 = (1 << 64) - 1
RAW_SPAN = 1 << 64
MAX_BELOW = 1 << 63

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def rejection_below(next_raw, n, span=RAW_SPAN):
    """Uniform integer in [0, n) from a raw source uniform on [0, span).

    Raw draws at or above the largest multiple of n that fits in the span
    are rejected and redrawn, so every residue is exactly equally likely.
    """
    limit = span - span % n
    while True:
        u = next_raw()
        if u < limit:
            return u % n


class SplitMix64:
    """splitmix64 stream: identical seeds give identical output, forever.

    The object is a plain mutable value; use it from one logical thread at
    a time. ``raw_draws`` counts calls to :meth:`next_raw`, which lets audit
    trails record exactly how much of the stream each step consumed.
    """

    __slots__ = ("state", "raw_draws")

    def __init__(self, seed):
        if not 0 <= seed < RAW_SPAN:
            raise ValueError(f"seed must be in [0, 2^64), got {seed}")
        self.state = seed
        self.raw_draws = 0

    def next_raw(self):
        """Advance the state one step and return the next 64-bit output."""
        self.state = s = (self.state + _GAMMA) & MASK64
        z = (s ^ (s >> 30)) * _MIX1 & MASK64
        z = (z ^ (z >> 27)) * _MIX2 & MASK64
        self.raw_draws += 1
        return z ^ (z >> 31)

    def uniform_below(self, n):
        """Exactly uniform integer in [0, n), for 1 <= n <= 2^63."""
        if not 1 <= n <= MAX_BELOW:
            raise ValueError(f"n must be in [1, 2^63], got {n}")
        return rejection_below(self.next_raw, n)

    def permutation(self, n):
        """Uniform permutation of 0..n-1 via high-to-low Fisher-Yates.

        For i = n-1 down to 1, position i is swapped with a uniform
        j in [0, i]. Each of the n! permutations is exactly equally
        likely given uniform raw output.
        """
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        a = list(range(n))
        for i in range(n - 1, 0, -1):
            j = rejection_below(self.next_raw, i + 1)
            a[i], a[j] = a[j], a[i]
        return a
