"""Compare the compiled and pure-Python simulation kernels.

    python benchmarks/bench_kernels.py [--reps 200] [--album-size 670] [--packet-size 5]

Both kernels run the same replications and must produce identical arrays.
"""
import argparse
import time

import numpy as np

from sticker_collector import _kernel_py

try:
    from sticker_collector import _kernel
except ImportError:
    _kernel = None


def timed(mod, N, n, distinct, seed, reps):
    packets = np.zeros(reps, dtype=np.int64)
    dups = np.zeros(reps, dtype=np.int64)
    started = time.perf_counter()
    mod.run_batch(N, n, distinct, seed, 0, reps, packets, dups)
    return time.perf_counter() - started, packets, dups


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--album-size", type=int, default=670)
    ap.add_argument("--packet-size", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    N, n = args.album_size, args.packet_size

    print(f"album {N}, packets of {n}, {args.reps} replications per kernel")
    print(f"{'model':<9} {'kernel':<9} {'seconds':>9} {'reps/s':>12} {'speedup':>8}")
    for distinct in (False, True):
        model = "distinct" if distinct else "iid"
        t_py, p_py, d_py = timed(_kernel_py, N, n, distinct, args.seed, args.reps)
        print(f"{model:<9} {'python':<9} {t_py:9.3f} {args.reps / t_py:12.1f} {1.0:8.1f}")
        if _kernel is None:
            print(f"{model:<9} {'compiled':<9} {'not built':>9}")
            continue
        t_c, p_c, d_c = timed(_kernel, N, n, distinct, args.seed, args.reps)
        assert np.array_equal(p_py, p_c) and np.array_equal(d_py, d_c), "kernels disagree"
        print(f"{model:<9} {'compiled':<9} {t_c:9.3f} {args.reps / t_c:12.1f} {t_py / t_c:8.1f}")


if __name__ == "__main__":
    main()
