"""Completion-time distribution from the absorbing chain on "stickers owned".

State ``m`` is the number of distinct stickers held. A packet moves the
chain from ``m`` to ``m + j`` where ``j`` is the number of new stickers in
it; ``m = N`` is absorbing. Everything here is a sum of non-negative
doubles, so unlike the inclusion-exclusion sums there is no cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .album import AlbumSpec, PacketModel

__all__ = [
    "OwnedCountDistribution",
    "Estimate",
    "transition_distribution",
    "owned_count_sweep",
    "survival_dp",
    "survival_dp_sweep",
    "expectation_dp",
    "quantile_dp",
]


@dataclass(frozen=True)
class OwnedCountDistribution:
    after_packets: int
    mass: np.ndarray

    @property
    def survival(self) -> float:
        if self.mass[-1] == 0.0:
            return 1.0
        # summing the transient states avoids computing 1 - mass[N]
        return min(1.0, float(self.mass[:-1].sum()))

    @property
    def cdf(self) -> float:
        return float(self.mass[-1])


@dataclass(frozen=True)
class Estimate:
    """A value with a certified absolute error bound."""

    value: float
    error_bound: float
    terms: int


def _check_owned(spec: AlbumSpec, m: int) -> None:
    if not 0 <= m <= spec.total_stickers:
        raise ValueError(f"owned count must lie in [0, {spec.total_stickers}], got {m}")


def transition_distribution(
    spec: AlbumSpec, model: PacketModel | str, owned: int, exact: bool = False
) -> dict[int, float] | dict[int, Fraction]:
    """Law of the number of new stickers in the next packet, given ``owned``.

    Returns ``{j: P(j new)}`` over the support only. With ``exact=True``
    the probabilities are :class:`~fractions.Fraction`.
    """
    model = PacketModel.parse(model)
    _check_owned(spec, owned)
    N, n, m = spec.total_stickers, spec.packet_size, owned
    if model is PacketModel.DISTINCT:
        denom = math.comb(N, n)
        law = {
            j: Fraction(math.comb(N - m, j) * math.comb(m, n - j), denom)
            for j in range(max(0, n - m), min(n, N - m) + 1)
        }
    else:
        # compose n single draws, each new with probability (N - m')/N
        law = {0: Fraction(1)}
        for _ in range(n):
            nxt: dict[int, Fraction] = {}
            for j, w in law.items():
                have = m + j
                new = Fraction(N - have, N)
                if new:
                    nxt[j + 1] = nxt.get(j + 1, 0) + w * new
                if have:
                    nxt[j] = nxt.get(j, 0) + w * (1 - new)
            law = nxt
        law = {j: w for j, w in sorted(law.items()) if w}
    if exact:
        return law
    return {j: float(w) for j, w in law.items()}


def _distinct_kernel(spec: AlbumSpec) -> np.ndarray:
    """``K[m, j] = P(j new | m owned)`` as correctly rounded doubles."""
    N, n = spec.total_stickers, spec.packet_size
    denom = math.comb(N, n)
    kernel = np.zeros((N + 1, n + 1))
    for m in range(N + 1):
        for j in range(max(0, n - m), min(n, N - m) + 1):
            kernel[m, j] = math.comb(N - m, j) * math.comb(m, n - j) / denom
    return kernel


def owned_count_sweep(
    spec: AlbumSpec, model: PacketModel | str
) -> Iterator[OwnedCountDistribution]:
    """Yield the owned-count distribution after 0, 1, 2, ... packets (forever)."""
    model = PacketModel.parse(model)
    N, n = spec.total_stickers, spec.packet_size
    mass = np.zeros(N + 1)
    mass[0] = 1.0
    k = 0
    yield OwnedCountDistribution(0, mass.copy())
    if model is PacketModel.DISTINCT:
        kernel = _distinct_kernel(spec)
        while True:
            nxt = np.zeros(N + 1)
            for j in range(n + 1):
                nxt[j:] += mass[: N + 1 - j] * kernel[: N + 1 - j, j]
            mass = nxt
            k += 1
            yield OwnedCountDistribution(k, mass.copy())
    else:
        owned = np.arange(N + 1, dtype=float)
        stay = owned / N
        move = (N - owned) / N
        while True:
            for _ in range(n):
                nxt = mass * stay
                nxt[1:] += mass[:-1] * move[:-1]
                mass = nxt
            k += 1
            yield OwnedCountDistribution(k, mass.copy())


def survival_dp_sweep(spec: AlbumSpec, model: PacketModel | str, k_max: int) -> np.ndarray:
    """``P(T > k)`` for ``k = 0 .. k_max`` as an array."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    out = np.empty(k_max + 1)
    for dist in owned_count_sweep(spec, model):
        out[dist.after_packets] = dist.survival
        if dist.after_packets == k_max:
            break
    # survival cannot increase; this only strips last-ulp rounding wiggle
    return np.minimum.accumulate(out)


def survival_dp(spec: AlbumSpec, model: PacketModel | str, k: int) -> float:
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ValueError(f"k must be an integer >= 0, got {k!r}")
    return float(survival_dp_sweep(spec, model, k)[k])


def expectation_dp(
    spec: AlbumSpec, model: PacketModel | str, tail_tolerance: float = 1e-12
) -> Estimate:
    """``E(T) = sum_k P(T > k)``, truncated with a geometric tail certificate.

    Stops at the first ``K`` where ``P(T > K) < tail_tolerance`` and the
    one-step ratio ``rho = P(T > K) / P(T > K - 1)`` is below one; the
    error bound is ``P(T > K) * rho / (1 - rho)``.
    """
    if not tail_tolerance > 0:
        raise ValueError("tail_tolerance must be positive")
    partial: list[float] = []
    prev = None
    for dist in owned_count_sweep(spec, model):
        s = dist.survival
        partial.append(s)
        if s == 0.0:
            return Estimate(math.fsum(partial), 0.0, len(partial))
        if s < tail_tolerance and prev is not None:
            rho = s / prev
            if rho >= 1.0:
                raise ArithmeticError(f"survival ratio {rho} >= 1 at k={dist.after_packets}")
            return Estimate(math.fsum(partial), s * rho / (1.0 - rho), len(partial))
        prev = s


def quantile_dp(spec: AlbumSpec, model: PacketModel | str, p: float) -> int:
    """Smallest ``k`` with ``P(T <= k) >= p``."""
    if not 0 < p < 1:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    for dist in owned_count_sweep(spec, model):
        if dist.cdf >= p:
            return dist.after_packets
    raise AssertionError("unreachable")
