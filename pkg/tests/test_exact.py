import math
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import iid_draw_survival, literal_first_completion, setwise_first_completion
from sticker_collector import AlbumSpec
from sticker_collector.exact import (
    BigFloatConfig,
    ExactProbability,
    PrecisionError,
    all_distinct_packet_probability,
    binomial_row,
    expected_packets_exact,
    expected_packets_rational,
    expected_stickers_approx,
    expected_stickers_exact,
    harmonic_number,
    miss_probability,
    pmf_exact,
    pmf_rational,
    render_decimal,
    sticker_survival_iid,
    sticker_survival_iid_rational,
    survival_exact,
    survival_rational,
    survival_sweep,
)

EPS = 2.0**-40


def small_albums(max_n=12):
    return st.integers(1, max_n).flatmap(lambda N: st.tuples(st.just(N), st.integers(1, N)))


# -- harmonic numbers and the single-sticker expectation ---------------------


def test_harmonic_small():
    assert harmonic_number(1) == 1
    assert harmonic_number(2) == Fraction(3, 2)


def test_harmonic_670_against_asymptotic():
    h = float(harmonic_number(670))
    assert h == pytest.approx(7.08524, abs=5e-6)
    asymptotic = math.log(670) + 0.5772156649015329 + 1 / (2 * 670) - 1 / (12 * 670**2)
    assert abs(h - asymptotic) < 1e-10


def test_harmonic_rejects_zero():
    with pytest.raises(ValueError):
        harmonic_number(0)
    with pytest.raises(ValueError):
        expected_stickers_exact(0)


def test_expected_stickers():
    assert expected_stickers_exact(1) == 1
    assert expected_stickers_exact(2) == 3
    e = expected_stickers_exact(670)
    assert render_decimal(e, 1) == Decimal("4747.1")
    assert math.ceil(e) == 4748


def test_approximation():
    assert expected_stickers_approx(1) == pytest.approx(1.0772156649)
    assert expected_stickers_approx(670) == pytest.approx(4747.1, abs=0.05)
    for N in (10, 100, 670):
        assert abs(expected_stickers_approx(N) - float(expected_stickers_exact(N))) < 1.0


# -- binomials and miss probabilities -----------------------------------------


@pytest.mark.parametrize("n", [0, 1, 7, 30, 670])
def test_binomial_row(n):
    assert binomial_row(n) == tuple(math.comb(n, i) for i in range(n + 1))


def test_miss_probability_examples(paper_album):
    assert miss_probability(paper_album, 0).value == 1
    assert miss_probability(AlbumSpec(3, 2), 1).value == Fraction(1, 3)
    assert miss_probability(paper_album, 666).value == 0
    with pytest.raises(ValueError):
        miss_probability(paper_album, 671)


def test_exact_probability_rendering_keeps_value():
    p = ExactProbability(Fraction(2, 3))
    assert p.render(3) == Decimal("0.667")
    assert p.render(1) == Decimal("0.7")
    assert p.value == Fraction(2, 3)
    assert ExactProbability(Fraction(1, 8)).render(2) == Decimal("0.12")  # half-even
    with pytest.raises(ValueError):
        ExactProbability(Fraction(3, 2))


# -- survival -----------------------------------------------------------------


def test_survival_small_examples():
    spec = AlbumSpec(3, 2)
    assert survival_rational(spec, 1) == 1
    assert survival_rational(spec, 2) == Fraction(1, 3)
    assert survival_exact(spec, 1) == 1.0
    assert survival_exact(spec, 2) == pytest.approx(1 / 3, abs=1e-15)


def test_survival_table_row_918(paper_album):
    assert survival_exact(paper_album, 918) == pytest.approx(0.50050, abs=5e-6)


def test_precision_config_enforced(paper_album):
    with pytest.raises(ValueError):
        survival_exact(paper_album, 900, BigFloatConfig(670 + 63))
    survival_exact(paper_album, 900, BigFloatConfig(670 + 64))


def test_too_little_precision_is_caught_not_returned(paper_album):
    # bypass the guard to show what a short mantissa does at k just above the bound
    cfg = BigFloatConfig(80)
    object.__setattr__(cfg, "require", lambda total: None)
    with pytest.raises(PrecisionError):
        survival_sweep(paper_album, list(range(134, 200)), cfg)


def test_sweep_matches_pointwise(paper_album):
    ks = [134, 500, 918, 1500]
    assert survival_sweep(paper_album, ks) == pytest.approx(
        [survival_exact(paper_album, k) for k in ks], abs=1e-15
    )


def test_sweep_rejects_unsorted(paper_album):
    with pytest.raises(ValueError):
        survival_sweep(paper_album, [900, 800])


@settings(max_examples=60, deadline=None)
@given(small_albums(), st.integers(0, 25))
def test_bigfloat_matches_rational(album, k):
    spec = AlbumSpec(*album)
    assert abs(survival_exact(spec, k) - float(survival_rational(spec, k))) <= EPS


@settings(max_examples=60, deadline=None)
@given(small_albums())
def test_survival_is_one_below_coverage_bound(album):
    spec = AlbumSpec(*album)
    for k in range(spec.min_packets):
        assert survival_rational(spec, k) == 1
        assert abs(survival_exact(spec, k) - 1) <= EPS


@settings(max_examples=40, deadline=None)
@given(small_albums(30))
def test_survival_monotone(album):
    spec = AlbumSpec(*album)
    values = survival_sweep(spec, range(0, 4 * spec.min_packets + 20))
    assert values[0] == 1.0
    for a, b in zip(values, values[1:]):
        assert b <= a + EPS
        assert 0.0 <= b <= 1.0


# -- pmf -----------------------------------------------------------------------


def test_pmf_small_examples():
    spec = AlbumSpec(3, 2)
    assert pmf_rational(spec, 1) == 0
    assert pmf_rational(spec, 2) == Fraction(2, 3)
    assert pmf_exact(spec, 2) == pytest.approx(2 / 3, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(small_albums(20), st.integers(1, 40))
def test_pmf_telescopes(album, k):
    spec = AlbumSpec(*album)
    s = survival_sweep(spec, [k - 1, k])
    assert abs(pmf_exact(spec, k) - (s[0] - s[1])) <= EPS
    total = sum(pmf_rational(spec, j) for j in range(1, k + 1))
    assert total == 1 - survival_rational(spec, k)


def test_literal_and_setwise_enumeration_agree():
    for N, n in [(3, 1), (3, 2), (4, 2), (4, 3)]:
        assert literal_first_completion(N, n, 4) == setwise_first_completion(N, n, 4)


@pytest.mark.parametrize("N", range(1, 6))
def test_pmf_matches_enumeration(N):
    for n in range(1, N + 1):
        spec = AlbumSpec(N, n)
        counted = setwise_first_completion(N, n, 8)
        for k, prob in counted.items():
            assert pmf_rational(spec, k) == prob, (N, n, k)


# -- expectation ---------------------------------------------------------------


def test_expected_packets_examples(paper_album):
    assert expected_packets_rational(AlbumSpec(2, 1)) == 3
    assert expected_packets_rational(AlbumSpec(3, 2)) == Fraction(5, 2)
    assert expected_packets_exact(paper_album) == pytest.approx(946.98, abs=0.005)


def test_expected_packets_bigfloat_agrees(paper_album):
    ref = expected_packets_exact(paper_album)
    big = expected_packets_exact(paper_album, method="bigfloat")
    assert abs(big - ref) / ref < 1e-12


@pytest.mark.parametrize("N", [1, 2, 5, 17, 60])
def test_packet_size_one_reduces_to_single_stickers(N):
    assert expected_packets_rational(AlbumSpec(N, 1)) == expected_stickers_exact(N)


@pytest.mark.parametrize("N", [1, 4, 9, 670])
def test_full_packet_is_one(N):
    spec = AlbumSpec(N, N)
    assert expected_packets_rational(spec) == 1
    assert expected_packets_exact(spec, method="bigfloat") == 1.0
    assert survival_exact(spec, 1) == 0.0
    assert pmf_exact(spec, 1) == 1.0


@settings(max_examples=25, deadline=None)
@given(small_albums(12))
def test_expectation_is_sum_of_survival(album):
    spec = AlbumSpec(*album)
    E = expected_packets_rational(spec)
    s, k = 1.0, 0
    total = 0.0
    while s >= 1e-13:
        s = survival_exact(spec, k)
        total += s
        k += 1
    assert total == pytest.approx(float(E), rel=1e-6)


# -- single-sticker survival and the packet product ---------------------------


def test_sticker_survival_iid_examples():
    assert sticker_survival_iid(2, 1) == 1.0
    assert sticker_survival_iid(2, 2) == 0.5
    assert sticker_survival_iid(2, 3) == 0.25


@pytest.mark.parametrize("N,r", [(1, 0), (1, 3), (3, 2), (3, 5), (4, 6)])
def test_sticker_survival_iid_enumeration(N, r):
    expected = iid_draw_survival(N, r)
    assert sticker_survival_iid_rational(N, r) == expected
    assert abs(sticker_survival_iid(N, r) - float(expected)) <= EPS


def test_all_distinct_packet_probability(paper_album):
    assert all_distinct_packet_probability(paper_album) == pytest.approx(0.985, abs=5e-4)
    assert all_distinct_packet_probability(AlbumSpec(40, 1)) == 1.0
    assert all_distinct_packet_probability(AlbumSpec(5, 5)) == pytest.approx(0.0384, abs=1e-15)


def test_float64_sum_is_useless_at_full_size(paper_album):
    """The alternating sum in doubles leaves [0, 1]; the big-float path does not."""
    N, n = 670, 5
    denom = math.comb(N, n)
    k = 200
    naive = 0.0
    for i in range(1, N + 1):
        term = float(math.comb(N, i)) * (math.comb(N - i, n) / denom) ** k
        naive += term if i % 2 else -term
    assert not 0.0 <= naive <= 1.0
    assert 0.0 <= survival_exact(paper_album, k) <= 1.0
