"""Pure-Python simulation kernel (reference for, and fallback to, ``_kernel``)."""
from __future__ import annotations

from .rng import Xoshiro256, fmix64, GOLDEN, MASK64


def _packet(gen: Xoshiro256, N: int, n: int, distinct: bool) -> list[int]:
    if not distinct:
        return [gen.below(N) for _ in range(n)]
    # Floyd's algorithm: a uniform n-subset in n draws
    chosen: list[int] = []
    seen: set[int] = set()
    for j in range(N - n, N):
        t = gen.below(j + 1)
        if t in seen:
            t = j
        seen.add(t)
        chosen.append(t)
    return chosen


def simulate_trace(N, n, distinct, seed, snapshot_at=()):
    """Run one collection, recording owned counts and owned-set snapshots.

    Returns ``(packets, duplicates, owned_counts, snapshots)`` where
    ``owned_counts[k-1]`` is the number owned after packet ``k`` and
    ``snapshots`` maps packet index to a sorted tuple of 1-based labels.
    """
    gen = Xoshiro256(seed)
    owned = bytearray(N)
    have = dups = packets = 0
    counts = []
    snapshots = {}
    wanted = set(snapshot_at)
    while have < N:
        for s in _packet(gen, N, n, distinct):
            if owned[s]:
                dups += 1
            else:
                owned[s] = 1
                have += 1
        packets += 1
        counts.append(have)
        if packets in wanted:
            snapshots[packets] = tuple(i + 1 for i in range(N) if owned[i])
    return packets, dups, counts, snapshots


def simulate_one(N, n, distinct, seed):
    gen = Xoshiro256(seed)
    owned = bytearray(N)
    have = dups = packets = 0
    while have < N:
        for s in _packet(gen, N, n, distinct):
            if owned[s]:
                dups += 1
            else:
                owned[s] = 1
                have += 1
        packets += 1
    return packets, dups


def run_batch(N, n, distinct, master_seed, start, stop, packets_out, dups_out):
    """Fill ``packets_out[i]``, ``dups_out[i]`` for replications ``start <= i < stop``."""
    mixed = fmix64(master_seed)
    for i in range(start, stop):
        seed = fmix64((mixed + (i + 1) * GOLDEN) & MASK64)
        packets_out[i], dups_out[i] = simulate_one(N, n, distinct, seed)
