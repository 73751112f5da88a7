"""Benchmark: numba-compiled kernels vs the pure-numpy fallback path.

Times the batch trial simulation and the vectorized normal primitives on
both implementations and prints a small comparison table. Run with numba
installed to see both columns; the numpy fallback is always available.

Usage: python bench/benchmark.py [--replicates 100000] [--n 10]
"""

import argparse
import time

import numpy as np

from twostage import _kernels


def _time(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replicates", type=int, default=100_000)
    ap.add_argument("--n", type=int, default=10)
    args = ap.parse_args()
    m, n = args.replicates, args.n

    rows = []
    u = np.random.default_rng(0).uniform(1e-12, 1 - 1e-12, size=1_000_000)
    x = np.random.default_rng(1).normal(size=1_000_000)

    def add(name, numpy_fn, numba_fn):
        t_np = _time(numpy_fn)
        t_nb = _time(numba_fn) if _kernels.USING_NUMBA else None
        rows.append((name, t_np, t_nb))

    add(f"simulate_batch m={m} n={n} det",
        lambda: _kernels.simulate_batch_numpy(
            _kernels._RULE_DETERMINISTIC, 0.0, 0.0, 0.0, n, 0, m, 42),
        lambda: _kernels.simulate_batch_numba(
            _kernels._RULE_DETERMINISTIC, 0.0, 0.0, 0.0, n, 0, m,
            np.uint64(42)) if _kernels.USING_NUMBA else None)
    add(f"simulate_batch m={m} n={n} prob(0,10)",
        lambda: _kernels.simulate_batch_numpy(
            _kernels._RULE_PROBABILISTIC, 0.0, 10.0, 0.0, n, 0, m, 42),
        lambda: _kernels.simulate_batch_numba(
            _kernels._RULE_PROBABILISTIC, 0.0, 10.0, 0.0, n, 0, m,
            np.uint64(42)) if _kernels.USING_NUMBA else None)
    add("norm_cdf on 1e6 points",
        lambda: _kernels.norm_cdf_numpy(x),
        lambda: _kernels.norm_cdf_ufunc(x) if _kernels.USING_NUMBA else None)
    add("norm_ppf on 1e6 points",
        lambda: _kernels.norm_ppf_numpy(u),
        lambda: _kernels.norm_ppf_ufunc(u) if _kernels.USING_NUMBA else None)

    print(f"{'kernel':44s} {'numpy (s)':>10s} {'numba (s)':>10s} {'speedup':>8s}")
    for name, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{name:44s} {t_np:10.4f} {'n/a':>10s} {'n/a':>8s}")
        else:
            print(f"{name:44s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")
    if not _kernels.USING_NUMBA:
        print("\nnumba path inactive (not installed or disabled via "
              "TWOSTAGE_DISABLE_NUMBA); only the numpy column was measured.")


if __name__ == "__main__":
    main()
