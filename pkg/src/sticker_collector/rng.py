"""The pinned random generator shared by both simulation kernels.

* Stream seeds: ``stream_seed(master, i) = fmix64(fmix64(master) + (i + 1) * GOLDEN)``
  with ``fmix64`` the SplitMix64 output function and ``GOLDEN = 0x9E3779B97F4A7C15``
  (all arithmetic mod 2**64).
* Per-stream generator: xoshiro256** (period 2**256 - 1), its four state
  words being four consecutive SplitMix64 outputs started at the stream seed.
* Bounded integers: the upper 32 bits of each xoshiro256** output fed to
  Lemire's multiply-and-reject method, so every draw is exactly uniform.

The compiled kernel in ``_kernel.pyx`` implements the same recipe and must
produce identical streams; ``tests/test_kernels.py`` checks that.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
MASK32 = (1 << 32) - 1
GOLDEN = 0x9E3779B97F4A7C15


def fmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_seed(master_seed: int, index: int) -> int:
    """Seed of replication ``index`` under ``master_seed``."""
    return fmix64((fmix64(master_seed) + (index + 1) * GOLDEN) & MASK64)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** with SplitMix64 seeding."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & MASK64
        words = []
        for _ in range(4):
            state = (state + GOLDEN) & MASK64
            words.append(fmix64(state))
        self.s0, self.s1, self.s2, self.s3 = words

    def next64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def next32(self) -> int:
        return self.next64() >> 32

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``; ``1 <= bound < 2**32``."""
        m = self.next32() * bound
        low = m & MASK32
        if low < bound:
            threshold = ((1 << 32) - bound) % bound
            while low < threshold:
                m = self.next32() * bound
                low = m & MASK32
        return m >> 32
