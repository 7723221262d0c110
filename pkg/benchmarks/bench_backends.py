#!/usr/bin/env python3
"""Benchmark the numba hot kernels against the pure-numpy fallback.

Times the three pairwise primitives and a full coordinate-exchange run on
identical inputs under both backends and prints a comparison table.  The
backends are imported directly (not via LOWDISC_BACKEND), so one process
can time both.

    python benchmarks/bench_backends.py --n 512 --d 10 --repeats 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lowdisc import _numba_kernels, _numpy_kernels
from lowdisc import backends
from lowdisc.generators import GeneratorConfig, GeneratorKind, generate, transform_to_target
from lowdisc.optimizer import coordinate_exchange
from lowdisc.targets import standard_normal


def _time(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--n", type=int, default=512)
    parser.add_argument("--d", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    z = np.ascontiguousarray(rng.normal(size=(args.n, args.d)))
    gamma = np.ones(args.d)

    impls = {"numba": _numba_kernels, "numpy": _numpy_kernels}
    # Trigger JIT compilation outside the timed region.
    _numba_kernels.pairwise_kernel_sum(z[:4], gamma)
    _numba_kernels.pairwise_kernel_matrix(z[:4], gamma)
    _numba_kernels.coord_interaction_sums(
        z[:4], _numba_kernels.pairwise_kernel_matrix(z[:4], gamma), gamma
    )

    print(f"hot-kernel timings, N={args.n}, d={args.d} (best of {args.repeats}):")
    print(f"{'primitive':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    rows = []
    for name, call in (
        ("pairwise_kernel_sum", lambda m: m.pairwise_kernel_sum(z, gamma)),
        ("pairwise_kernel_matrix", lambda m: m.pairwise_kernel_matrix(z, gamma)),
        (
            "coord_interaction_sums",
            lambda m: m.coord_interaction_sums(z, m.pairwise_kernel_matrix(z, gamma), gamma),
        ),
    ):
        t = {k: _time(call, m, repeats=args.repeats) for k, m in impls.items()}
        rows.append((name, t))
        print(
            f"{name:<28}{t['numba'] * 1e3:>12.3f}{t['numpy'] * 1e3:>12.3f}"
            f"{t['numpy'] / t['numba']:>10.2f}x"
        )

    # Agreement check on the exact values.
    a = _numba_kernels.pairwise_kernel_sum(z, gamma)
    b = _numpy_kernels.pairwise_kernel_sum(z, gamma)
    print(f"\npairwise sums agree to {abs(a - b) / abs(b):.2e} relative "
          f"(active package backend: {backends.backend_name()})")

    target = standard_normal(args.d)
    start = transform_to_target(
        generate(GeneratorConfig(GeneratorKind.ESOBOL, args.n, args.d, args.seed)), target
    )
    t0 = time.perf_counter()
    _, trace = coordinate_exchange(start, target)
    elapsed = time.perf_counter() - t0
    print(
        f"coordinate_exchange (active backend): {elapsed:.2f}s, "
        f"{trace.iterations} iterations, "
        f"discrepancy {trace.initial_discrepancy:.4f} -> {trace.final_discrepancy:.4f}"
    )


if __name__ == "__main__":
    main()
