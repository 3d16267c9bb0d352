"""Monte Carlo replay of buying packets until the album is full.

The inner loop runs in the compiled ``_kernel`` extension when it is
available and in ``_kernel_py`` otherwise (or when the environment variable
``STICKER_COLLECTOR_PURE_PYTHON=1`` is set). Both consume the generator
described in :mod:`sticker_collector.rng` identically, so results do not
depend on which one ran.

Replication ``i`` of a batch always uses ``stream_seed(master_seed, i)``
and writes into slot ``i`` of the output arrays; the summary is computed
from those arrays afterwards, so it is the same for any thread count.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import IO, Sequence

import numpy as np

from . import _kernel_py
from .album import AlbumSpec, PacketModel
from .exact import render_decimal
from .reporting import histogram_bins
from .rng import stream_seed

if os.environ.get("STICKER_COLLECTOR_PURE_PYTHON") == "1":
    _kernel = _kernel_py
else:
    try:
        from . import _kernel  # type: ignore[attr-defined]
    except ImportError:
        _kernel = _kernel_py

#: "compiled" or "python"
KERNEL = "python" if _kernel is _kernel_py else "compiled"

#: Master seed used when none is given.
DEFAULT_SEED = 20220801


@dataclass(frozen=True)
class SimulationConfig:
    spec: AlbumSpec
    model: PacketModel = PacketModel.IID
    replications: int = 100_000
    master_seed: int = DEFAULT_SEED
    trace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "model", PacketModel.parse(self.model))
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class ReplicationOutcome:
    packets: int
    duplicates: int
    owned_counts: tuple[int, ...] | None = None
    snapshots: dict[int, tuple[int, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class BatchSummary:
    replications: int
    mean_packets: float
    min_packets: int
    max_packets: int
    q25: int
    q50: int
    q75: int
    mean_duplicates: float
    sd_packets: float
    skewness: float
    histogram: list[tuple[int, int, int]]
    total_cost_mean: Decimal
    master_seed: int
    model: PacketModel
    spec: AlbumSpec

    def to_dict(self) -> dict:
        return {
            "album_size": self.spec.total_stickers,
            "packet_size": self.spec.packet_size,
            "price": str(self.spec.packet_price),
            "model": self.model.value,
            "seed": self.master_seed,
            "replications": self.replications,
            "mean_packets": f"{self.mean_packets:.4f}",
            "sd_packets": f"{self.sd_packets:.4f}",
            "skewness": f"{self.skewness:.4f}",
            "min_packets": self.min_packets,
            "q25": self.q25,
            "q50": self.q50,
            "q75": self.q75,
            "max_packets": self.max_packets,
            "mean_duplicates": f"{self.mean_duplicates:.4f}",
            "mean_cost": str(self.total_cost_mean),
            "histogram": [{"lo": lo, "hi": hi, "count": c} for lo, hi, c in self.histogram],
        }


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def simulate_one(
    spec: AlbumSpec, model: PacketModel | str, seed: int, trace: bool = False
) -> ReplicationOutcome:
    """One collector buying packets until done, driven by stream ``seed``."""
    model = PacketModel.parse(model)
    distinct = model is PacketModel.DISTINCT
    _check_seed(seed)
    N, n = spec.total_stickers, spec.packet_size
    if trace:
        packets, dups, counts, _ = _kernel_py.simulate_trace(N, n, distinct, seed)
        return ReplicationOutcome(packets, dups, tuple(counts))
    packets, dups = _kernel.simulate_one(N, n, distinct, seed)
    return ReplicationOutcome(int(packets), int(dups))


def trace_collection(
    spec: AlbumSpec, model: PacketModel | str, seed: int, snapshot_at: Sequence[int] = ()
) -> ReplicationOutcome:
    """Like :func:`simulate_one` with the per-packet trace and owned-set snapshots.

    Snapshots requested past the completing packet are simply absent.
    """
    snapshot_at = list(snapshot_at)
    if any(b <= a for a, b in zip(snapshot_at, snapshot_at[1:])):
        raise ValueError("snapshot indices must be strictly increasing")
    if snapshot_at and snapshot_at[0] < 1:
        raise ValueError("snapshot indices start at packet 1")
    model = PacketModel.parse(model)
    _check_seed(seed)
    packets, dups, counts, snaps = _kernel_py.simulate_trace(
        spec.total_stickers, spec.packet_size, model is PacketModel.DISTINCT, seed, snapshot_at
    )
    return ReplicationOutcome(packets, dups, tuple(counts), snaps)


def run_replications(config: SimulationConfig, threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Raw ``(packets, duplicates)`` arrays in replication order."""
    B = config.replications
    N, n = config.spec.total_stickers, config.spec.packet_size
    distinct = config.model is PacketModel.DISTINCT
    packets = np.zeros(B, dtype=np.int64)
    dups = np.zeros(B, dtype=np.int64)
    threads = threads or os.cpu_count() or 1
    if threads < 1:
        raise ValueError("threads must be >= 1")
    # fixed chunk boundaries; which thread runs a chunk does not matter
    chunk = max(1, min(4096, -(-B // threads)))
    bounds = [(s, min(s + chunk, B)) for s in range(0, B, chunk)]

    def work(span):
        _kernel.run_batch(N, n, distinct, config.master_seed, span[0], span[1], packets, dups)

    if threads == 1 or len(bounds) == 1:
        for span in bounds:
            work(span)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, bounds))
    return packets, dups


def _quantile_from_counts(values: np.ndarray, counts: np.ndarray, total: int, p: float) -> int:
    """Smallest value whose empirical CDF reaches ``p`` (integer arithmetic)."""
    p = Fraction(p)
    cum = np.cumsum(counts)
    need = p * total
    for v, c in zip(values, cum):
        if c >= need:
            return int(v)
    return int(values[-1])


def summarize(
    spec: AlbumSpec,
    model: PacketModel,
    master_seed: int,
    packets: np.ndarray,
    dups: np.ndarray,
    bin_width: int = 50,
) -> BatchSummary:
    B = len(packets)
    N, n = spec.total_stickers, spec.packet_size
    if not np.all(n * packets == N + dups):
        raise AssertionError("kernel broke the accounting identity n*T = N + D")
    values, counts = np.unique(packets, return_counts=True)
    total_packets = int(packets.sum())
    mean = Fraction(total_packets, B)
    centered = packets - float(mean)
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    start = (spec.min_packets // bin_width) * bin_width
    return BatchSummary(
        replications=B,
        mean_packets=float(mean),
        min_packets=int(values[0]),
        max_packets=int(values[-1]),
        q25=_quantile_from_counts(values, counts, B, 0.25),
        q50=_quantile_from_counts(values, counts, B, 0.5),
        q75=_quantile_from_counts(values, counts, B, 0.75),
        mean_duplicates=float(Fraction(int(dups.sum()), B)),
        sd_packets=math.sqrt(m2 * B / (B - 1)) if B > 1 else 0.0,
        skewness=m3 / m2**1.5 if m2 > 0 else 0.0,
        histogram=histogram_bins(packets.tolist(), bin_width, start=start),
        total_cost_mean=render_decimal(mean * Fraction(spec.packet_price), 2),
        master_seed=master_seed,
        model=model,
        spec=spec,
    )


def simulate_batch(
    config: SimulationConfig, threads: int | None = None, bin_width: int = 50
) -> tuple[BatchSummary, tuple[np.ndarray, np.ndarray]]:
    """Run ``config.replications`` collections; return the summary and raw arrays."""
    packets, dups = run_replications(config, threads)
    summary = summarize(config.spec, config.model, config.master_seed, packets, dups, bin_width)
    return summary, (packets, dups)


def write_raw_csv(fh: IO[str], packets: np.ndarray, dups: np.ndarray) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["rep", "packets", "duplicates"])
    for i, (t, d) in enumerate(zip(packets.tolist(), dups.tolist())):
        writer.writerow([i, t, d])


__all__ = [
    "KERNEL",
    "DEFAULT_SEED",
    "SimulationConfig",
    "ReplicationOutcome",
    "BatchSummary",
    "simulate_one",
    "trace_collection",
    "run_replications",
    "summarize",
    "simulate_batch",
    "write_raw_csv",
    "stream_seed",
]
