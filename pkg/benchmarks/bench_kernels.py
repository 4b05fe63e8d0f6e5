"""Time the compiled and numpy kernels on the same exhaustive AP count.

    python3 benchmarks/bench_kernels.py [--m 16] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from soficlab import kernels
from soficlab.groups import GroupSpec
from soficlab.partitions import BernoulliSpace, canonical_bernoulli_partition, pattern_measures
from soficlab.sofic import build_quotient_approx


def setup(m: int):
    Z = GroupSpec.integers()
    sigma = build_quotient_approx(Z, [m])[0]
    alpha = canonical_bernoulli_partition(BernoulliSpace(Z, (0.5, 0.5)))
    F = [Z.identity(), Z.element([1])]
    mu = pattern_measures(alpha, F, 2)
    inv = np.ascontiguousarray(sigma.inverse_images(F))
    return inv, mu


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--eps", type=float, default=0.3)
    args = ap.parse_args()
    inv, mu = setup(args.m)
    total = 2**args.m
    results = {}
    for name, impl in kernels.backends().items():
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            count = impl.count_range(inv, mu, 2, 0, total, args.eps, 1e-9, None)
            best = min(best, time.perf_counter() - t0)
        results[name] = (count, best)
        print(f"{name:<8} count={count:<10d} best={best:.4f}s  ({total / best:,.0f} labelings/s)")
    counts = {c for c, _ in results.values()}
    assert len(counts) == 1, "backends disagree"
    if "cython" in results:
        print(f"speedup  {results['python'][1] / results['cython'][1]:.1f}x")


if __name__ == "__main__":
    main()
