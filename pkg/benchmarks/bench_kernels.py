"""Benchmark the compiled kernels against the pure-NumPy fallback.

Times approximate-entropy counting and recurrence counting on windows of
realistic sizes, checks both backends agree bitwise, and prints a table:

    python benchmarks/bench_kernels.py [--sizes 250,500,1000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from penmetrics import _purekernels

try:
    from penmetrics import _fastkernels
except ImportError:
    _fastkernels = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="250,500,1000,2000")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _fastkernels is None:
        print("compiled backend unavailable; timing the pure backend only")

    rng = np.random.default_rng(0)
    header = f"{'kernel':<12}{'n':>6}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        x = rng.normal(size=n)
        r = 0.2 * float(np.std(x))
        eps = 0.5 * float(np.std(x))
        for name, pure_fn, fast_fn, check in (
            ("apen", lambda: _purekernels.apen_counts(x, 2, r),
             (lambda: _fastkernels.apen_counts(x, 2, r)) if _fastkernels else None,
             lambda a, b: np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])),
            ("rqa", lambda: _purekernels.rqa_counts(x, 3, 2, eps, 2),
             (lambda: _fastkernels.rqa_counts(x, 3, 2, eps, 2)) if _fastkernels else None,
             lambda a, b: a == b),
        ):
            t_pure = _time(pure_fn, args.repeat)
            if fast_fn is None:
                print(f"{name:<12}{n:>6}{t_pure * 1e3:>12.3f}{'n/a':>15}{'':>9}")
                continue
            t_fast = _time(fast_fn, args.repeat)
            if not check(pure_fn(), fast_fn()):
                raise AssertionError(f"backend mismatch for {name} at n={n}")
            print(f"{name:<12}{n:>6}{t_pure * 1e3:>12.3f}{t_fast * 1e3:>15.3f}"
                  f"{t_pure / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
