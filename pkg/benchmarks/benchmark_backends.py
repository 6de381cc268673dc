#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each algorithm variant for a fixed iteration count on two problem
sizes, times both backends, and cross-checks that the final states agree.
The first numba call compiles (cached on disk afterwards); a warmup run
is excluded from the timings.

Usage: python benchmarks/benchmark_backends.py [--iters N]
"""

import argparse
import time

import numpy as np

from oadmm.backend import NUMBA_AVAILABLE
from oadmm.engine import AlgorithmConfig, StopRule, run
from oadmm.problem import generate_regression
from oadmm.topology import generate_random_graph

CASES = (
    ("M=50 density=0.10", 50, 0.10),
    ("M=200 density=0.05", 200, 0.05),
)
VARIANTS = ("classical", "censoring", "oadmm", "soadmm")


def time_run(variant, graph, dataset, iters, backend):
    stop = StopRule(target_accuracy=0.0, max_iterations=iters)  # never early-stops
    t0 = time.perf_counter()
    trace = run(AlgorithmConfig(variant), graph, dataset, stop,
                backend=backend, check_invariants=False)
    return time.perf_counter() - t0, trace


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iters", type=int, default=200, help="iterations per timed run")
    args = parser.parse_args()

    if not NUMBA_AVAILABLE:
        print("numba not importable; nothing to compare")
        return

    print(f"{'case':<22} {'variant':<10} {'numpy':>9} {'numba':>9} {'speedup':>8} {'max|dtheta|':>12}")
    for label, m_count, density in CASES:
        graph = generate_random_graph(m_count, density, (0, 0))
        dataset = generate_regression(m_count, 3, 3, (0, 1))
        for variant in VARIANTS:
            time_run(variant, graph, dataset, 3, "numba")  # jit warmup
            t_np, tr_np = time_run(variant, graph, dataset, args.iters, "numpy")
            t_nb, tr_nb = time_run(variant, graph, dataset, args.iters, "numba")
            acc_np = np.array([r.accuracy for r in tr_np.records])
            acc_nb = np.array([r.accuracy for r in tr_nb.records])
            dev = float(np.max(np.abs(acc_np - acc_nb)))
            print(f"{label:<22} {variant:<10} {t_np:>8.3f}s {t_nb:>8.3f}s "
                  f"{t_np / t_nb:>7.1f}x {dev:>12.2e}")


if __name__ == "__main__":
    main()
