"""Portable seeded random number generation.

Every stochastic piece of the package (triplet/pair sampling, weight
initialization, synthetic data) draws from :class:`Xoshiro256`, a
splitmix64-initialized xoshiro256** generator implemented here so that a
given seed yields the same stream on any platform or Python build.  Bulk
uniform fills are delegated to the compiled kernel when it is available;
the stream is identical either way because both lanes advance the same
integer state.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import xoshiro_fill_uniform

_MASK64 = (1 << 64) - 1
_INV_2_53 = 2.0 ** -53


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (next state, output word)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256:
    """xoshiro256** with splitmix64 seeding.

    Not safe for concurrent draws from one instance; create one generator
    per thread with distinct seeds.
    """

    def __init__(self, seed: int):
        sm = seed & _MASK64
        state = []
        for _ in range(4):
            sm, word = _splitmix64(sm)
            state.append(word)
        if not any(state):  # all-zero state is the one forbidden xoshiro state
            state[0] = 1
        self._s = state
        self._spare_gauss: float | None = None

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def fill_uniform(self, n: int) -> np.ndarray:
        """n uniform doubles in [0, 1); same stream as n calls to random()."""
        out = np.empty(n, dtype=np.float64)
        state = np.array(self._s, dtype=np.uint64)
        xoshiro_fill_uniform(state, out)
        self._s = [int(w) for w in state]
        return out

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError(f"randint bound must be positive, got {n}")
        limit = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def gauss(self) -> float:
        """Standard normal via Box-Muller (pairs generated, one cached)."""
        if self._spare_gauss is not None:
            z = self._spare_gauss
            self._spare_gauss = None
            return z
        # u1 in (0, 1] so the log is finite; u2 in [0, 1)
        u1 = ((self.next_u64() >> 11) + 1) * _INV_2_53
        u2 = (self.next_u64() >> 11) * _INV_2_53
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_gauss = r * math.sin(theta)
        return r * math.cos(theta)

    def fill_gauss(self, n: int) -> np.ndarray:
        return np.array([self.gauss() for _ in range(n)], dtype=np.float64)
