"""Benchmark the accelerated kernels against the pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--rays N] [--boxes B] [--points P]

The public ray_cast / scatter_nearest entry points use numba unless
COOPAUG_DISABLE_NUMBA=1 is set; the fallbacks are benchmarked directly so a
single run covers both paths and verifies they agree bitwise.
"""

import argparse
import time

import numpy as np

from coopaug.kernels import (NUMBA_ENABLED, _ray_cast_numpy,
                             _scatter_nearest_numpy, ray_cast, scatter_nearest)


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rays", type=int, default=131072)
    parser.add_argument("--boxes", type=int, default=32)
    parser.add_argument("--points", type=int, default=500000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    backend = "numba" if NUMBA_ENABLED else "numpy (numba disabled)"
    print(f"active backend: {backend}")

    origin = np.array([0.0, 0.0, 2.0])
    dirs = rng.normal(size=(args.rays, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    centers = rng.uniform(-60.0, 60.0, size=(args.boxes, 3))
    centers[:, 2] = 1.0
    boxes = np.hstack([centers, rng.uniform(0.5, 3.0, size=(args.boxes, 3))])

    ray_cast(origin, dirs[:16], 0.0, boxes, 120.0)  # compile warm-up
    t_fast, out_fast = timeit(lambda: ray_cast(origin, dirs, 0.0, boxes, 120.0))
    t_slow, out_slow = timeit(lambda: _ray_cast_numpy(origin, dirs, 0.0, boxes, 120.0))
    assert np.array_equal(out_fast, out_slow), "backends disagree"
    print(f"ray_cast        {args.rays} rays x {args.boxes} boxes: "
          f"active {t_fast * 1e3:8.2f} ms, numpy {t_slow * 1e3:8.2f} ms, "
          f"speedup {t_slow / t_fast:5.2f}x")

    H, W = 64, 2048
    rows = rng.integers(0, H, size=args.points)
    cols = rng.integers(0, W, size=args.points)
    ranges = rng.uniform(1.0, 120.0, size=args.points)
    intens = rng.uniform(0.0, 1.0, size=args.points)

    scatter_nearest(rows[:16], cols[:16], ranges[:16], intens[:16], H, W)
    t_fast, out_fast = timeit(lambda: scatter_nearest(rows, cols, ranges, intens, H, W))
    t_slow, out_slow = timeit(
        lambda: _scatter_nearest_numpy(rows, cols, ranges, intens, H, W))
    assert np.array_equal(out_fast[0], out_slow[0]), "backends disagree"
    print(f"scatter_nearest {args.points} points into {H}x{W}: "
          f"active {t_fast * 1e3:8.2f} ms, numpy {t_slow * 1e3:8.2f} ms, "
          f"speedup {t_slow / t_fast:5.2f}x")


if __name__ == "__main__":
    main()
