"""Command-line front end.

Exit codes: 0 ok, 2 bad usage, 3 numeric (precision) failure, 4 ``check``
found a disagreement between backends.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from fractions import Fraction

from . import dp, exact, reporting, simulate
from .album import AlbumSpec, PacketModel
from .exact import BigFloatConfig, PrecisionError, render_decimal

FORMAT_ENV = "STICKER_COLLECTOR_FORMAT"
FORMATS = ("table", "csv", "json")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    """``"500,600,700"`` or ``"500:1000:50"`` (inclusive) or a mix of both."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            if len(bits) not in (2, 3):
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            lo, hi, step = bits[0], bits[1], bits[2] if len(bits) == 3 else 1
            if step < 1:
                raise argparse.ArgumentTypeError("range step must be >= 1")
            out.extend(range(lo, hi + 1, step))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _price(text: str) -> Decimal:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_finite() or value < 0:
        raise argparse.ArgumentTypeError("price must be a non-negative number")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    default_format = os.environ.get(FORMAT_ENV, "table")
    if default_format not in FORMATS:
        default_format = "table"

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--album-size", type=_positive_int, default=670, help="stickers in the album (default 670)")
    common.add_argument("--packet-size", type=_positive_int, default=5, help="stickers per packet (default 5)")
    common.add_argument("--price", type=_price, default=Decimal("4"), help="price of one packet (default 4)")
    common.add_argument("--model", choices=[m.value for m in PacketModel], default=None,
                        help="packet model (default: distinct, or iid for simulate)")
    common.add_argument("--method", choices=reporting.BACKENDS, default=None,
                        help="exact (inclusion-exclusion) or dp (absorbing chain)")
    common.add_argument("--precision-bits", type=_positive_int, default=None,
                        help="big-float precision (default max(256, album_size + 64))")
    common.add_argument("--format", choices=FORMATS, default=default_format,
                        help=f"output format (default {default_format}; env {FORMAT_ENV})")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="sticker-collector",
        description="Packets (and money) needed to complete a sticker album.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expect", parents=[common], help="expected packets, stickers and cost")
    p.add_argument("--digits", type=int, default=2, help="decimal places for the expectation (default 2)")

    p = sub.add_parser("table", parents=[common], help="completion probability and cost per k")
    p.add_argument("--ks", type=_int_list, default=list(reporting.PAPER_KS),
                   help="packet counts, e.g. 500,600 or 500:1800:100 (default: the 23 published rows)")

    p = sub.add_parser("survival", parents=[common], help="P(T > k) for one k")
    p.add_argument("--k", type=int, default=918)

    p = sub.add_parser("quantile", parents=[common], help="smallest k with P(T <= k) >= p")
    p.add_argument("--p", type=_float_list, default=[0.25, 0.5, 0.75])

    p = sub.add_parser("curve", parents=[common], help="dense CDF series for plotting")
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--step", type=_positive_int, default=1)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo batch of collections")
    p.add_argument("--reps", type=int, default=100_000, help="replications B (default 100000)")
    p.add_argument("--seed", type=_seed, default=simulate.DEFAULT_SEED,
                   help=f"master seed (default {simulate.DEFAULT_SEED})")
    p.add_argument("--threads", type=_positive_int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--bin-width", type=_positive_int, default=50)
    p.add_argument("--histogram", default=None, help="write lo,hi,count CSV here")
    p.add_argument("--raw", default=None, help="write rep,packets,duplicates CSV here")
    p.add_argument("--trace-at", type=_int_list, default=None,
                   help="packet indices at which to snapshot replication 0's owned set")
    p.add_argument("--trace-out", default=None, help="write replication 0's trace as JSON here")

    sub.add_parser("check", parents=[common], help="cross-check the backends against each other")
    return parser


# -- helpers -----------------------------------------------------------------


def _spec(args) -> AlbumSpec:
    try:
        return AlbumSpec(args.album_size, args.packet_size, args.price)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _model(args, default: PacketModel) -> PacketModel:
    return PacketModel.parse(args.model) if args.model else default


def _method(args, model: PacketModel) -> str:
    if args.method:
        return args.method
    return "exact" if model is PacketModel.DISTINCT else "dp"


def _cfg(args, spec: AlbumSpec) -> BigFloatConfig:
    cfg = BigFloatConfig(args.precision_bits) if args.precision_bits else BigFloatConfig.for_album(spec.total_stickers)
    try:
        cfg.require(spec.total_stickers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _emit_mapping(out, record: dict, fmt: str) -> None:
    if fmt == "json":
        json.dump(record, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        out.write("field,value\n")
        for key, value in record.items():
            if isinstance(value, (list, dict)):
                continue
            out.write(f"{key},{value}\n")
    else:
        width = max(len(k) for k in record)
        for key, value in record.items():
            if isinstance(value, (list, dict)):
                continue
            out.write(f"{key.ljust(width)}  {value}\n")


def _fmt(x: float, digits: int) -> str:
    return str(Decimal(x).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))


# -- subcommands -------------------------------------------------------------


def cmd_expect(args, out) -> int:
    spec = _spec(args)
    model = _model(args, PacketModel.DISTINCT)
    method = _method(args, model)
    N, n = spec.total_stickers, spec.packet_size
    bound = 0.0
    if method == "exact":
        if model is not PacketModel.DISTINCT:
            raise UsageError("--method exact covers the distinct model only; use --method dp for iid")
        value = exact.expected_packets_rational(spec)
    else:
        est = dp.expectation_dp(spec, model)
        value, bound = Fraction(est.value), est.error_bound
    shown = render_decimal(value, args.digits)
    stickers = exact.expected_stickers_exact(N)
    ceil_packets = math.ceil(value)
    record = {
        "album_size": N,
        "packet_size": n,
        "model": model.value,
        "method": method,
        "expected_packets": str(shown),
        "error_bound": f"{bound:.3g}",
        "expected_cost": str((spec.packet_price * shown).quantize(reporting.CENT)),
        "packets_rounded_up": ceil_packets,
        "cost_rounded_up": str(reporting.cost_of(ceil_packets, spec.packet_price).quantize(reporting.CENT)),
        "expected_stickers": str(render_decimal(stickers, 4)),
        "expected_stickers_ceil": math.ceil(stickers),
        "expected_stickers_round": int(render_decimal(stickers, 0)),
        "expected_stickers_approx": _fmt(exact.expected_stickers_approx(N), 4),
        "stickers_per_packet_ratio": str(render_decimal(stickers / n, 4)),
    }
    _emit_mapping(out, record, args.format)
    return EXIT_OK


def cmd_table(args, out) -> int:
    spec = _spec(args)
    model = _model(args, PacketModel.DISTINCT)
    method = _method(args, model)
    ks = sorted(set(args.ks))
    if ks[0] < 0:
        raise UsageError("packet counts must be >= 0")
    cfg = _cfg(args, spec) if method == "exact" else None
    rows = reporting.completion_table(spec, ks, method, model, cfg)
    for row in rows:
        if row.near_boundary:
            print(f"note: k={row.k} sits within 1e-9 of a rounding tie ({row.raw!r})", file=sys.stderr)
    reporting.write_table(rows, out, args.format)
    return EXIT_OK


def cmd_survival(args, out) -> int:
    spec = _spec(args)
    model = _model(args, PacketModel.DISTINCT)
    method = _method(args, model)
    if args.k < 0:
        raise UsageError("k must be >= 0")
    if method == "exact":
        cfg = _cfg(args, spec)
        if model is PacketModel.DISTINCT:
            s = exact.survival_exact(spec, args.k, cfg)
        else:
            s = exact.sticker_survival_iid(spec.total_stickers, args.k * spec.packet_size, cfg)
    else:
        s = dp.survival_dp(spec, model, args.k)
    record = {
        "k": args.k,
        "model": model.value,
        "method": method,
        "survival": f"{s:.12f}",
        "completion_probability": f"{1 - s:.12f}",
        "cost": str(reporting.cost_of(args.k, spec.packet_price).quantize(reporting.CENT)),
    }
    _emit_mapping(out, record, args.format)
    return EXIT_OK


def cmd_quantile(args, out) -> int:
    spec = _spec(args)
    model = _model(args, PacketModel.DISTINCT)
    method = _method(args, model)
    cfg = _cfg(args, spec) if method == "exact" else None
    records = []
    for p in args.p:
        if not 0 < p < 1:
            raise UsageError(f"quantile level must lie in (0, 1), got {p}")
        k = reporting.quantile(spec, p, method, model, cfg)
        before, at = reporting.completion_probabilities(spec, [k - 1, k], method, model, cfg)
        records.append({
            "p": repr(p),
            "k": str(k),
            "cdf_at_k": str(reporting.render_probability(at)),
            "cdf_before": str(reporting.render_probability(before)),
            "cost": str(reporting.cost_of(k, spec.packet_price).quantize(reporting.CENT)),
        })
        if args.format == "table":
            print(f"note: P(T <= {k - 1}) = {before:.5f} < {p} <= P(T <= {k}) = {at:.5f}", file=sys.stderr)
    reporting._write(out, ("p", "k", "cdf_at_k", "cdf_before", "cost"), records, args.format)
    return EXIT_OK


def cmd_curve(args, out) -> int:
    spec = _spec(args)
    model = _model(args, PacketModel.DISTINCT)
    method = _method(args, model)
    cfg = _cfg(args, spec) if method == "exact" else None
    points = reporting.cdf_curve(spec, args.k_min, args.k_max, args.step, method, model, cfg)
    reporting.write_curve(points, out, args.format)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    spec = _spec(args)
    model = _model(args, PacketModel.IID)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    config = simulate.SimulationConfig(spec, model, args.reps, args.seed)
    print(f"seed={args.seed} kernel={simulate.KERNEL}", file=sys.stderr)
    started = time.perf_counter()
    summary, (packets, dups) = simulate.simulate_batch(config, args.threads, args.bin_width)
    print(f"elapsed={time.perf_counter() - started:.2f}s", file=sys.stderr)
    record = summary.to_dict()
    _emit_mapping(out, record, args.format)
    if args.histogram:
        with open(args.histogram, "w", encoding="utf-8", newline="\n") as fh:
            reporting.write_histogram(summary.histogram, fh, "csv")
    if args.raw:
        with open(args.raw, "w", encoding="utf-8", newline="\n") as fh:
            simulate.write_raw_csv(fh, packets, dups)
    if args.trace_out or args.trace_at:
        snap = sorted(set(args.trace_at or []))
        trace = simulate.trace_collection(spec, model, simulate.stream_seed(args.seed, 0), snap)
        payload = {
            "replication": 0,
            "packets": trace.packets,
            "duplicates": trace.duplicates,
            "owned_after_packet": list(trace.owned_counts),
            "snapshots": {str(k): list(v) for k, v in trace.snapshots.items()},
        }
        if args.trace_out:
            with open(args.trace_out, "w", encoding="utf-8", newline="\n") as fh:
                json.dump(payload, fh)
                fh.write("\n")
        else:
            json.dump(payload, out)
            out.write("\n")
    return EXIT_OK


def run_checks(spec: AlbumSpec, cfg: BigFloatConfig) -> list[tuple[str, bool, str]]:
    """Cross-backend agreement suite; returns ``(name, passed, detail)`` triples."""
    results = []
    N, n = spec.total_stickers, spec.packet_size

    rational = float(exact.expected_packets_rational(spec))
    big = exact.expected_packets_exact(spec, cfg, method="bigfloat")
    rel = abs(big - rational) / rational
    results.append(("E(T) big-float vs rational", rel <= 1e-6, f"rel diff {rel:.2e}"))

    est = dp.expectation_dp(spec, PacketModel.DISTINCT)
    rel = abs(est.value - rational) / rational
    results.append(("E(T) dp vs rational", rel <= 1e-6, f"{est.value:.9f} vs {rational:.9f} (bound {est.error_bound:.1e})"))

    if (N, n) == (670, 5):
        ks = list(reporting.PAPER_KS)
    else:
        hi = dp.quantile_dp(spec, PacketModel.DISTINCT, 0.999)
        step = max(1, (hi - spec.min_packets) // 20)
        ks = list(range(spec.min_packets, hi + 1, step))
    sx = exact.survival_sweep(spec, ks, cfg)
    sd = dp.survival_dp_sweep(spec, PacketModel.DISTINCT, ks[-1])
    worst = max(abs(a - sd[k]) for k, a in zip(ks, sx))
    results.append(("survival dp vs inclusion-exclusion (distinct)", worst <= 1e-9, f"max diff {worst:.2e}"))

    si = dp.survival_dp_sweep(spec, PacketModel.IID, ks[-1])
    worst = max(abs(exact.sticker_survival_iid(N, k * n, cfg) - si[k]) for k in ks)
    results.append(("survival dp vs single-sticker sum (iid)", worst <= 1e-9, f"max diff {worst:.2e}"))

    ordered = all(sd[k] <= si[k] + 1e-12 for k in ks)
    results.append(("distinct survival <= iid survival", ordered, f"{len(ks)} points"))

    eiid = dp.expectation_dp(spec, PacketModel.IID)
    lo = float(exact.expected_stickers_exact(N)) / n
    results.append(("iid E(T) within [E(R)/n, E(R)/n + 1]", lo <= eiid.value <= lo + 1, f"{eiid.value:.6f} in [{lo:.6f}, {lo + 1:.6f}]"))
    return results


def cmd_check(args, out) -> int:
    spec = _spec(args)
    cfg = _cfg(args, spec)
    results = run_checks(spec, cfg)
    failed = 0
    for name, ok, detail in results:
        failed += not ok
        out.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}\n")
    out.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return EXIT_CHECK if failed else EXIT_OK


COMMANDS = {
    "expect": cmd_expect,
    "table": cmd_table,
    "survival": cmd_survival,
    "quantile": cmd_quantile,
    "curve": cmd_curve,
    "simulate": cmd_simulate,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buffer = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buffer)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = buffer.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
