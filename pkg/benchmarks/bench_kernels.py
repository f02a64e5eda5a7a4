#!/usr/bin/env python3
"""Benchmark the compiled pair-interaction kernel against the NumPy fallback.

The energy/gradient evaluation dominates MALA runtime (O(n^2) per step),
so this is the number that decides how long the bulk validation runs take.

Usage: python benchmarks/bench_kernels.py [--sizes 8,64,256,1024] [--repeats 5]
"""

import argparse
import time

import numpy as np

from jellium2d._kernels import IMPLEMENTATION, pairwise_numpy

try:
    from jellium2d._kernels import _pairwise
except ImportError:
    _pairwise = None


def time_call(fn, pos, alpha, R, repeats, min_time=0.05):
    loops = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(loops):
            fn(pos, alpha, R)
        dt = time.perf_counter() - t0
        if dt >= min_time:
            break
        loops *= 4
    best = dt / loops
    for _ in range(repeats - 1):
        t0 = time.perf_counter()
        for _ in range(loops):
            fn(pos, alpha, R)
        best = min(best, (time.perf_counter() - t0) / loops)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="8,64,256,1024")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    print(f"selected implementation at import: {IMPLEMENTATION}")
    header = f"{'n':>6} {'numpy (ms)':>12} {'cython (ms)':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        pos = np.ascontiguousarray(rng.normal(size=(n, 2)))
        t_np = time_call(pairwise_numpy.energy_and_gradient, pos, float(n), 1.0,
                         args.repeats)
        if _pairwise is not None:
            t_cy = time_call(_pairwise.energy_and_gradient, pos, float(n), 1.0,
                             args.repeats)
            e_np, g_np = pairwise_numpy.energy_and_gradient(pos, float(n), 1.0)
            e_cy, g_cy = _pairwise.energy_and_gradient(pos, float(n), 1.0)
            assert abs(e_np - e_cy) < 1e-9 * max(1.0, abs(e_np))
            assert np.allclose(g_np, g_cy, rtol=1e-12, atol=1e-12)
            print(f"{n:>6} {t_np * 1e3:>12.4f} {t_cy * 1e3:>12.4f} "
                  f"{t_np / t_cy:>8.1f}x")
        else:
            print(f"{n:>6} {t_np * 1e3:>12.4f} {'n/a':>12} {'':>8}")


if __name__ == "__main__":
    main()
