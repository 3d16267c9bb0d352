# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel.

Bit-for-bit twin of ``_kernel_py``; see ``rng.py`` for the generator recipe.
"""
from libc.stdint cimport uint8_t, uint32_t, uint64_t, int64_t
from libc.stdlib cimport calloc, free
from libc.string cimport memset

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL

ctypedef struct xoshiro:
    uint64_t s0, s1, s2, s3


cdef inline uint64_t fmix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline void seed_state(xoshiro* g, uint64_t seed) noexcept nogil:
    seed += GOLDEN
    g.s0 = fmix64(seed)
    seed += GOLDEN
    g.s1 = fmix64(seed)
    seed += GOLDEN
    g.s2 = fmix64(seed)
    seed += GOLDEN
    g.s3 = fmix64(seed)


cdef inline uint32_t next32(xoshiro* g) noexcept nogil:
    cdef uint64_t result = rotl(g.s1 * 5, 7) * 9
    cdef uint64_t t = g.s1 << 17
    g.s2 ^= g.s0
    g.s3 ^= g.s1
    g.s1 ^= g.s2
    g.s0 ^= g.s3
    g.s2 ^= t
    g.s3 = rotl(g.s3, 45)
    return <uint32_t>(result >> 32)


cdef inline uint32_t below(xoshiro* g, uint32_t bound) noexcept nogil:
    cdef uint64_t m = <uint64_t>next32(g) * bound
    cdef uint32_t low = <uint32_t>m
    cdef uint32_t threshold
    if low < bound:
        threshold = (<uint32_t>(-bound)) % bound
        while low < threshold:
            m = <uint64_t>next32(g) * bound
            low = <uint32_t>m
    return <uint32_t>(m >> 32)


cdef int collect(int N, int n, bint distinct, uint64_t seed,
                 uint8_t* owned, uint32_t* stamp,
                 int64_t* packets_out, int64_t* dups_out) noexcept nogil:
    """One collection. ``owned`` (N bytes) and ``stamp`` (N words) are scratch."""
    cdef xoshiro g
    cdef int have = 0, j, i
    cdef int64_t packets = 0, dups = 0
    cdef uint32_t s, t
    seed_state(&g, seed)
    memset(owned, 0, N)
    if distinct:
        memset(stamp, 0, N * sizeof(uint32_t))
    while have < N:
        packets += 1
        if distinct:
            # Floyd's algorithm; stamp[x] == packets marks x as taken this packet
            for j in range(N - n, N):
                t = below(&g, j + 1)
                if stamp[t] == <uint32_t>packets:
                    t = j
                stamp[t] = <uint32_t>packets
                if owned[t]:
                    dups += 1
                else:
                    owned[t] = 1
                    have += 1
        else:
            for i in range(n):
                s = below(&g, N)
                if owned[s]:
                    dups += 1
                else:
                    owned[s] = 1
                    have += 1
    packets_out[0] = packets
    dups_out[0] = dups
    return 0


def simulate_one(int N, int n, bint distinct, uint64_t seed):
    cdef int64_t packets = 0, dups = 0
    cdef uint8_t* owned = <uint8_t*>calloc(N, 1)
    cdef uint32_t* stamp = <uint32_t*>calloc(N, sizeof(uint32_t))
    if owned == NULL or stamp == NULL:
        free(owned)
        free(stamp)
        raise MemoryError()
    try:
        collect(N, n, distinct, seed, owned, stamp, &packets, &dups)
    finally:
        free(owned)
        free(stamp)
    return packets, dups


def run_batch(int N, int n, bint distinct, uint64_t master_seed,
              Py_ssize_t start, Py_ssize_t stop,
              int64_t[::1] packets_out, int64_t[::1] dups_out):
    """Fill replications ``start <= i < stop``; releases the GIL while running."""
    cdef Py_ssize_t i
    cdef uint64_t mixed = fmix64(master_seed)
    cdef uint8_t* owned = <uint8_t*>calloc(N, 1)
    cdef uint32_t* stamp = <uint32_t*>calloc(N, sizeof(uint32_t))
    if owned == NULL or stamp == NULL:
        free(owned)
        free(stamp)
        raise MemoryError()
    try:
        with nogil:
            for i in range(start, stop):
                collect(N, n, distinct, fmix64(mixed + <uint64_t>(i + 1) * GOLDEN),
                        owned, stamp, &packets_out[i], &dups_out[i])
    finally:
        free(owned)
        free(stamp)
