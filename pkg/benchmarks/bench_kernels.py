#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python backend.

Run from the repository root after building the extension in place:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from htg_eval._kernels import _pure

try:
    from htg_eval._kernels import _core
except ImportError:
    _core = None


def bench(label, fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def lev_batch(impl, pairs):
    for a, b in pairs:
        impl.levenshtein_counts(a, b)


def main():
    rng = np.random.default_rng(0)
    rows = []

    pairs = [
        (
            rng.integers(0, 26, size=rng.integers(3, 15)).astype(np.int32),
            rng.integers(0, 26, size=rng.integers(3, 15)).astype(np.int32),
        )
        for _ in range(5000)
    ]
    t_pure = bench("lev", lev_batch, _pure, pairs)
    rows.append(("levenshtein x5000 (len<=15)", t_pure, None))
    if _core is not None:
        rows[-1] = (rows[-1][0], t_pure, bench("lev", lev_batch, _core, pairs))

    dist = np.abs(rng.normal(size=(500, 64)))
    second = np.sort(dist, axis=1)[:, 1].copy()
    t_pure = bench("edges", _pure.witness_edge_times, dist, second)
    rows.append(("witness_edge_times 500x64", t_pure, None))
    if _core is not None:
        rows[-1] = (rows[-1][0], t_pure, bench("edges", _core.witness_edge_times, dist, second))

    print(f"{'kernel':<32} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for label, pure_t, core_t in rows:
        if core_t is None:
            print(f"{label:<32} {pure_t * 1e3:>8.2f}ms {'n/a':>10} {'-':>8}")
        else:
            print(
                f"{label:<32} {pure_t * 1e3:>8.2f}ms {core_t * 1e3:>8.2f}ms "
                f"{pure_t / core_t:>7.1f}x"
            )
    if _core is None:
        print("\ncompiled extension not available; showing pure backend only")


if __name__ == "__main__":
    main()
