"""Benchmark the compiled repulsion kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [n_points]

Times one full-cloud evaluation per call, which is the per-tick cost shape of
the 250 Hz loop worst case (everything inside influence).
"""

import sys
import time

import numpy as np

from rcmadmit._kernels import _numpy

try:
    from rcmadmit._kernels import _fieldcore
except ImportError:
    _fieldcore = None


def make_cloud(n, seed=0):
    rng = np.random.default_rng(seed)
    points = rng.uniform(-0.01, 0.01, size=(n, 3))
    points[:, 2] -= 0.012  # keep the query point outside the spheres
    gains = np.full(n, 0.01)
    return points, gains


def bench(fn, *args, repeat=200):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
    points, gains = make_cloud(n)
    p_t = np.zeros(3)
    n_t = np.array([0.0, 0.0, 1.0])
    cases = {
        "tip_field": lambda impl: bench(
            impl.tip_field, points, gains, p_t, 0.0035, 0.0115, True
        ),
        "capsule_field": lambda impl: bench(
            impl.capsule_field, points, gains, p_t, n_t, 0.43, 0.007, 0.0115,
            True
        ),
        "segment_distances": lambda impl: bench(
            impl.segment_distances, points, p_t, n_t, 0.43
        ),
    }
    print(f"{n} cloud points, mean per call over 200 repeats")
    print(f"{'kernel':<20}{'numpy':>12}{'cython':>12}{'speedup':>10}")
    for name, runner in cases.items():
        t_np = runner(_numpy)
        if _fieldcore is None:
            print(f"{name:<20}{t_np * 1e6:>10.1f}us{'-':>12}{'-':>10}")
            continue
        t_cy = runner(_fieldcore)
        print(
            f"{name:<20}{t_np * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us"
            f"{t_np / t_cy:>9.1f}x"
        )
    if _fieldcore is None:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
