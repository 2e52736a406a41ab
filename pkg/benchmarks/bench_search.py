#!/usr/bin/env python3
"""Compare the numba and numpy search kernels (and the exact python loop at small sizes).

Times the raw kernels over the full box, so record construction and JSON
output are excluded.  The first numba call is reported separately because it
includes JIT compilation (or loading the on-disk cache).

    python benchmarks/bench_search.py --bounds 50 100 200 400
"""
import argparse
import time

import numpy as np

from cuboid_eform import _kernels

KERNELS = {
    "biquadratic": (_kernels.biquadratic_block, 0),
    "heron": (_kernels.heron_block, 1),
}


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bounds", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--python-max", type=int, default=60, help="skip the python loop above this bound")
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only numpy/python are timed")
    else:
        t0 = time.perf_counter()
        _kernels.biquadratic_block(0, 2, 2, "numba")
        _kernels.heron_block(1, 2, 2, "numba")
        print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.3f}s\n")

    print(f"{'kernel':<12}{'bound':>7}{'hits':>9}{'numba s':>10}{'numpy s':>10}{'python s':>10}{'speedup':>9}")
    for name, (fn, lo) in KERNELS.items():
        for bound in args.bounds:
            row = {}
            ref = None
            backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
            if bound <= args.python_max:
                backends.append("python")
            for be in backends:
                secs, hits = best_of(lambda: fn(lo, bound + 1, bound, be), args.repeat)
                hits = np.asarray(hits, dtype=np.int64).reshape(-1, 4)
                if ref is None:
                    ref = hits
                elif not np.array_equal(ref, hits):
                    raise SystemExit(f"{name} bound={bound}: {be} disagrees with numpy")
                row[be] = secs
            fmt = lambda k: f"{row[k]:>10.4f}" if k in row else f"{'-':>10}"  # noqa: E731
            speed = f"{row['numpy'] / row['numba']:>8.1f}x" if "numba" in row else f"{'-':>9}"
            print(f"{name:<12}{bound:>7}{len(ref):>9}{fmt('numba')}{fmt('numpy')}{fmt('python')}{speed}")


if __name__ == "__main__":
    main()
