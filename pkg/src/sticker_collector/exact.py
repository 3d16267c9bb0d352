"""Closed-form completion probabilities for the sticker collector.

Everything that does not involve a ``k``-th power is done in exact rational
arithmetic (:class:`fractions.Fraction`). The alternating inclusion-exclusion
sums over ``k`` use MPFR floats through :mod:`gmpy2` at a working precision
of at least ``N + 64`` bits: every term is bounded by ``C(N, N//2) < 2**N``,
so that many bits keep the absolute error of the sum far below ``2**-40``.
IEEE doubles are deliberately not offered for these sums; at ``N = 670``
and ``k`` near the coverage bound they return values like ``-2e37``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import gmpy2

from .album import AlbumSpec

__all__ = [
    "EULER_GAMMA",
    "CLAMP_TOLERANCE",
    "PrecisionError",
    "BigFloatConfig",
    "ExactProbability",
    "render_decimal",
    "binomial_row",
    "harmonic_number",
    "expected_stickers_exact",
    "expected_stickers_approx",
    "miss_probability",
    "survival_exact",
    "survival_rational",
    "survival_sweep",
    "pmf_exact",
    "pmf_rational",
    "expected_packets_rational",
    "expected_packets_exact",
    "sticker_survival_iid",
    "sticker_survival_iid_rational",
    "all_distinct_packet_probability",
]

#: Euler-Mascheroni constant, to the ten digits used by the approximation.
EULER_GAMMA = 0.5772156649

#: Probabilities this close outside [0, 1] are rounding dust and get clamped.
CLAMP_TOLERANCE = 2.0**-40


class PrecisionError(ArithmeticError):
    """A big-float sum landed outside [-2**-40, 1 + 2**-40]."""


@dataclass(frozen=True)
class BigFloatConfig:
    """Working precision (in bits) for the alternating sums."""

    precision_bits: int = 256

    def __post_init__(self):
        if self.precision_bits < 1:
            raise ValueError("precision_bits must be positive")

    @classmethod
    def for_album(cls, total_stickers: int) -> "BigFloatConfig":
        return cls(max(256, total_stickers + 64))

    def require(self, total_stickers: int) -> None:
        if self.precision_bits < total_stickers + 64:
            raise ValueError(
                f"precision_bits={self.precision_bits} is below total_stickers + 64 "
                f"= {total_stickers + 64}; the alternating sum would not be reliable"
            )


def render_decimal(value: Fraction | int, digits: int) -> Decimal:
    """Round an exact rational to ``digits`` places, half-to-even."""
    scaled = round(Fraction(value) * 10**digits)  # Fraction.__round__ is half-even
    return Decimal(scaled).scaleb(-digits)


@dataclass(frozen=True)
class ExactProbability:
    value: Fraction

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"probability out of range: {self.value}")

    def render(self, digits: int = 10) -> Decimal:
        return render_decimal(self.value, digits)

    def __float__(self) -> float:
        return float(self.value)


@lru_cache(maxsize=32)
def binomial_row(n: int) -> tuple[int, ...]:
    """``(C(n, 0), ..., C(n, n))`` via the multiplicative recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    row = [1] * (n + 1)
    for i in range(1, n + 1):
        row[i] = row[i - 1] * (n - i + 1) // i
    return tuple(row)


def harmonic_number(n: int) -> Fraction:
    if n < 1:
        raise ValueError("harmonic_number requires n >= 1")
    # common denominator n! keeps this to integer arithmetic
    fact = math.factorial(n)
    return Fraction(sum(fact // i for i in range(1, n + 1)), fact)


def expected_stickers_exact(n: int) -> Fraction:
    """Expected single stickers needed to see all ``n`` types, ``n * H_n``."""
    return n * harmonic_number(n)


def expected_stickers_approx(n: int) -> float:
    """Asymptotic ``n (ln n + gamma) + 1/2``."""
    if n < 1:
        raise ValueError("expected_stickers_approx requires n >= 1")
    return n * (math.log(n) + EULER_GAMMA) + 0.5


def _miss_fraction(spec: AlbumSpec, r: int) -> Fraction:
    N, n = spec.total_stickers, spec.packet_size
    return Fraction(math.comb(N - r, n), math.comb(N, n))


def miss_probability(spec: AlbumSpec, r: int) -> ExactProbability:
    """Probability that one packet avoids a fixed set of ``r`` stickers."""
    if not 0 <= r <= spec.total_stickers:
        raise ValueError(f"r must lie in [0, {spec.total_stickers}], got {r}")
    return ExactProbability(_miss_fraction(spec, r))


def _check_k(k: int, minimum: int = 0) -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < minimum:
        raise ValueError(f"packet count must be an integer >= {minimum}, got {k!r}")


def _clamp(value, what: str) -> float:
    x = float(value)
    if x < -CLAMP_TOLERANCE or x > 1 + CLAMP_TOLERANCE:
        raise PrecisionError(f"{what} = {x!r} lies outside [0, 1] beyond 2**-40")
    return min(max(x, 0.0), 1.0)


def _config(cfg: BigFloatConfig | None, total: int) -> BigFloatConfig:
    if cfg is None:
        cfg = BigFloatConfig.for_album(total)
    cfg.require(total)
    return cfg


def _alternating(terms: list) -> "gmpy2.mpfr":
    # fsum is exactly rounded, so the only error left is in the terms themselves
    return gmpy2.fsum(terms)


# -- survival P(T > k) ----------------------------------------------------


def survival_rational(spec: AlbumSpec, k: int) -> Fraction:
    """Exact ``P(T > k)`` under the distinct-packet model.

    The denominators grow like ``C(N, n)**k``; use for small albums only.
    """
    _check_k(k)
    N = spec.total_stickers
    row = binomial_row(N)
    total = Fraction(0)
    for i in range(1, N + 1):
        term = row[i] * _miss_fraction(spec, i) ** k
        total += term if i % 2 else -term
    return total


def survival_sweep(
    spec: AlbumSpec, ks: Iterable[int], cfg: BigFloatConfig | None = None, clamp: bool = True
) -> list[float]:
    """``P(T > k)`` for each ``k`` in an increasing sequence, in one pass.

    The powers ``p_i**k`` are carried forward between requested ``k`` values
    instead of being recomputed from scratch. ``clamp=False`` returns the raw
    sums (possibly a hair outside [0, 1]) without the range check.
    """
    ks = list(ks)
    for k in ks:
        _check_k(k)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("ks must be strictly increasing")
    N, n = spec.total_stickers, spec.packet_size
    cfg = _config(cfg, N)
    denom = math.comb(N, n)
    row = binomial_row(N)
    out = []
    with gmpy2.context(precision=cfg.precision_bits):
        # p_i = 0 for i > N - n; those terms only matter at k = 0
        live = range(1, N - n + 1)
        p = {i: gmpy2.mpfr(math.comb(N - i, n)) / denom for i in live}
        coeff = {i: gmpy2.mpfr(row[i]) if i % 2 else -gmpy2.mpfr(row[i]) for i in live}
        power = {i: gmpy2.mpfr(1) for i in live}
        current = 0
        for k in ks:
            if k == 0:
                out.append(1.0)
                continue
            step = k - current
            if step == 1:
                for i in live:
                    power[i] *= p[i]
            else:
                for i in live:
                    power[i] *= p[i] ** step
            current = k
            value = _alternating([coeff[i] * power[i] for i in live])
            out.append(_clamp(value, f"P(T > {k})") if clamp else float(value))
    return out


def survival_exact(spec: AlbumSpec, k: int, cfg: BigFloatConfig | None = None) -> float:
    """``P(T > k)`` for the distinct-packet model, evaluated in big-float."""
    return survival_sweep(spec, [k], cfg)[0]


# -- pmf P(T = k) -----------------------------------------------------------


def pmf_rational(spec: AlbumSpec, k: int) -> Fraction:
    _check_k(k, 1)
    N = spec.total_stickers
    row = binomial_row(N)
    total = Fraction(0)
    for i in range(1, N + 1):
        p = _miss_fraction(spec, i)
        term = row[i] * p ** (k - 1) * (1 - p)
        total += term if i % 2 else -term
    return total


def pmf_exact(spec: AlbumSpec, k: int, cfg: BigFloatConfig | None = None) -> float:
    """``P(T = k)`` for the distinct-packet model, in big-float."""
    _check_k(k, 1)
    N, n = spec.total_stickers, spec.packet_size
    cfg = _config(cfg, N)
    denom = math.comb(N, n)
    row = binomial_row(N)
    with gmpy2.context(precision=cfg.precision_bits):
        terms = []
        for i in range(1, N + 1):
            miss = math.comb(N - i, n)
            if miss == 0 and k > 1:
                continue
            p = gmpy2.mpfr(miss) / denom
            term = row[i] * p ** (k - 1) * (1 - p)
            terms.append(term if i % 2 else -term)
        return _clamp(_alternating(terms), f"P(T = {k})")


# -- expectation E(T) -------------------------------------------------------


def expected_packets_rational(spec: AlbumSpec) -> Fraction:
    """Exact ``E(T) = sum_i (-1)**(i-1) C(N, i) / (1 - p_i)``."""
    N, n = spec.total_stickers, spec.packet_size
    if n == N:
        return Fraction(1)
    denom = math.comb(N, n)
    row = binomial_row(N)
    total = Fraction(0)
    for i in range(1, N + 1):
        hit = denom - math.comb(N - i, n)  # (1 - p_i) * C(N, n), positive for i >= 1
        term = Fraction(row[i] * denom, hit)
        total += term if i % 2 else -term
    return total


def expected_packets_exact(
    spec: AlbumSpec, cfg: BigFloatConfig | None = None, method: str = "rational"
) -> float:
    """Expected packets to finish the album (distinct-packet model).

    ``method="rational"`` is the reference; ``"bigfloat"`` evaluates the
    same alternating sum in MPFR.
    """
    if method == "rational":
        return float(expected_packets_rational(spec))
    if method != "bigfloat":
        raise ValueError(f"unknown method {method!r}")
    N, n = spec.total_stickers, spec.packet_size
    if n == N:
        return 1.0
    cfg = _config(cfg, N)
    denom = math.comb(N, n)
    row = binomial_row(N)
    with gmpy2.context(precision=cfg.precision_bits):
        terms = []
        for i in range(1, N + 1):
            hit = gmpy2.mpfr(denom - math.comb(N - i, n)) / denom
            if hit == 0:
                raise ZeroDivisionError(f"p_{i} == 1")
            term = row[i] / hit
            terms.append(term if i % 2 else -term)
        return float(_alternating(terms))


# -- single-sticker (iid) survival -----------------------------------------


def sticker_survival_iid_rational(n_types: int, r: int) -> Fraction:
    _check_k(r)
    row = binomial_row(n_types)
    total = Fraction(0)
    for i in range(1, n_types + 1):
        term = row[i] * Fraction(n_types - i, n_types) ** r
        total += term if i % 2 else -term
    return total


def sticker_survival_iid(n_types: int, r: int, cfg: BigFloatConfig | None = None) -> float:
    """Probability that ``r`` independent uniform draws miss some of ``n_types``."""
    _check_k(r)
    if n_types < 1:
        raise ValueError("n_types must be >= 1")
    cfg = _config(cfg, n_types)
    if r == 0:
        return 1.0
    row = binomial_row(n_types)
    with gmpy2.context(precision=cfg.precision_bits):
        terms = []
        for i in range(1, n_types):
            term = row[i] * (gmpy2.mpfr(n_types - i) / n_types) ** r
            terms.append(term if i % 2 else -term)
        return _clamp(_alternating(terms), f"P(R > {r})")


def all_distinct_packet_probability(spec: AlbumSpec) -> float:
    """Chance that ``n`` draws with replacement are all different."""
    N, n = spec.total_stickers, spec.packet_size
    prob = Fraction(1)
    for j in range(1, n):
        prob *= 1 - Fraction(j, N)
    return float(prob)
