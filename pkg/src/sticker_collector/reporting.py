"""Completion tables, CDF curves and histograms as plot-ready rows."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from typing import IO, Iterable, Sequence

from . import dp, exact
from .album import AlbumSpec, PacketModel

#: The packet counts tabulated for the 670/5 album.
PAPER_KS = (
    500, 600, 650, 700, 750, 800, 826, 850, 900, 918, 950, 1000,
    1036, 1100, 1150, 1200, 1300, 1500, 1600, 1650, 1700, 1750, 1755,
)

BACKENDS = ("exact", "dp")

PROB_PLACES = Decimal("0.00001")
CENT = Decimal("0.01")
BOUNDARY_SLACK = 1e-9


@dataclass(frozen=True)
class CompletionTableRow:
    k: int
    probability: Decimal
    cost: Decimal
    raw: float
    near_boundary: bool = False

    def as_record(self) -> dict[str, str]:
        return {"k": str(self.k), "probability": str(self.probability), "cost": str(self.cost)}


def render_probability(x: float) -> Decimal:
    return Decimal(x).quantize(PROB_PLACES, rounding=ROUND_HALF_EVEN)


def near_rounding_boundary(x: float, slack: float = BOUNDARY_SLACK) -> bool:
    """True when ``x`` is within ``slack`` of a 5th-decimal rounding tie."""
    scaled = Decimal(x) * 100000
    frac = scaled - scaled.to_integral_value(rounding="ROUND_FLOOR")
    return abs(frac - Decimal("0.5")) * Decimal("1e-5") < Decimal(slack)


def cost_of(k: int, price) -> Decimal:
    """Exact ``k * price`` in decimal arithmetic."""
    if k < 0:
        raise ValueError("k must be >= 0")
    price = price if isinstance(price, Decimal) else Decimal(str(price))
    if price < 0:
        raise ValueError("price must be >= 0")
    return Decimal(k) * price


def completion_probabilities(
    spec: AlbumSpec,
    ks: Sequence[int],
    backend: str = "exact",
    model: PacketModel | str = PacketModel.DISTINCT,
    cfg=None,
) -> list[float]:
    """``P(T <= k)`` for each ``k`` (strictly increasing)."""
    ks = list(ks)
    if not ks:
        raise ValueError("ks must not be empty")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("ks must be strictly increasing")
    if ks[0] < 0:
        raise ValueError("packet counts must be >= 0")
    model = PacketModel.parse(model)
    if backend == "exact":
        if model is PacketModel.DISTINCT:
            surv = exact.survival_sweep(spec, ks, cfg)
        else:
            # iid packets: T > k exactly when k*n single draws miss a sticker
            n = spec.packet_size
            surv = [exact.sticker_survival_iid(spec.total_stickers, k * n, cfg) for k in ks]
    elif backend == "dp":
        sweep = dp.survival_dp_sweep(spec, model, ks[-1])
        surv = [float(sweep[k]) for k in ks]
    else:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return [1.0 - s for s in surv]


def completion_table(
    spec: AlbumSpec,
    ks: Sequence[int] = PAPER_KS,
    backend: str = "exact",
    model: PacketModel | str = PacketModel.DISTINCT,
    cfg=None,
) -> list[CompletionTableRow]:
    cdf = completion_probabilities(spec, ks, backend, model, cfg)
    return [
        CompletionTableRow(
            k=k,
            probability=render_probability(c),
            cost=cost_of(k, spec.packet_price).quantize(CENT, rounding=ROUND_HALF_EVEN),
            raw=c,
            near_boundary=near_rounding_boundary(c),
        )
        for k, c in zip(ks, cdf)
    ]


def default_curve_range(spec: AlbumSpec, model: PacketModel | str = PacketModel.DISTINCT) -> tuple[int, int]:
    return spec.min_packets, dp.quantile_dp(spec, model, 0.9999)


def cdf_curve(
    spec: AlbumSpec,
    k_min: int | None = None,
    k_max: int | None = None,
    step: int = 1,
    backend: str = "dp",
    model: PacketModel | str = PacketModel.DISTINCT,
    cfg=None,
) -> list[tuple[int, float]]:
    if k_min is None or k_max is None:
        lo, hi = default_curve_range(spec, model)
        k_min = lo if k_min is None else k_min
        k_max = hi if k_max is None else k_max
    if k_min > k_max:
        raise ValueError("k_min must not exceed k_max")
    if step < 1:
        raise ValueError("step must be >= 1")
    ks = list(range(k_min, k_max + 1, step))
    return list(zip(ks, completion_probabilities(spec, ks, backend, model, cfg)))


def histogram_bins(
    outcomes: Iterable[int], bin_width: int, start: int | None = None
) -> list[tuple[int, int, int]]:
    """Half-open bins ``[lo, lo + bin_width)`` from ``start`` through the maximum.

    ``start`` defaults to the minimum rounded down to a multiple of
    ``bin_width``. Empty bins inside the range are kept.
    """
    if bin_width < 1:
        raise ValueError("bin_width must be a positive integer")
    values = list(outcomes)
    if not values:
        raise ValueError("outcomes must not be empty")
    lo_val, hi_val = min(values), max(values)
    if start is None:
        start = (lo_val // bin_width) * bin_width
    if start > lo_val:
        raise ValueError("start lies above the smallest outcome")
    nbins = (hi_val - start) // bin_width + 1
    counts = [0] * nbins
    for v in values:
        counts[(v - start) // bin_width] += 1
    return [(start + i * bin_width, start + (i + 1) * bin_width, c) for i, c in enumerate(counts)]


# -- serialisation ----------------------------------------------------------


def _write(fh: IO[str], header: Sequence[str], records: list[dict], fmt: str) -> None:
    if fmt == "csv":
        writer = csv.DictWriter(fh, fieldnames=list(header), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
    elif fmt == "json":
        json.dump(records, fh, indent=2)
        fh.write("\n")
    elif fmt == "table":
        widths = [max(len(h), *(len(r[h]) for r in records)) if records else len(h) for h in header]
        fh.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
        for r in records:
            fh.write("  ".join(r[h].rjust(w) for h, w in zip(header, widths)) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def write_table(rows: Sequence[CompletionTableRow], fh: IO[str], fmt: str = "csv") -> None:
    _write(fh, ("k", "probability", "cost"), [r.as_record() for r in rows], fmt)


def write_curve(points: Sequence[tuple[int, float]], fh: IO[str], fmt: str = "csv", digits: int = 9) -> None:
    records = [{"k": str(k), "cdf": f"{c:.{digits}f}"} for k, c in points]
    _write(fh, ("k", "cdf"), records, fmt)


def write_histogram(bins: Sequence[tuple[int, int, int]], fh: IO[str], fmt: str = "csv") -> None:
    records = [{"lo": str(lo), "hi": str(hi), "count": str(c)} for lo, hi, c in bins]
    _write(fh, ("lo", "hi", "count"), records, fmt)


def quantile(
    spec: AlbumSpec,
    p: float,
    backend: str = "exact",
    model: PacketModel | str = PacketModel.DISTINCT,
    cfg=None,
) -> int:
    """Smallest ``k`` with ``P(T <= k) >= p`` under the chosen backend.

    The exact backend starts from the DP answer and confirms (or corrects)
    it by evaluating the inclusion-exclusion CDF at ``k`` and ``k - 1``.
    """
    k = dp.quantile_dp(spec, model, p)
    if backend == "dp":
        return k
    if backend != "exact":
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")

    def cdf(j: int) -> float:
        return completion_probabilities(spec, [j], "exact", model, cfg)[0]

    while k > 0 and cdf(k - 1) >= p:
        k -= 1
    while cdf(k) < p:
        k += 1
    return k
