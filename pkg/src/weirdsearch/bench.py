"""Benchmark the numba kernels against their pure-numpy fallbacks.

Each kernel pair runs on a representative workload; the numba side is
warmed once so JIT compilation is not billed to the measurement.  Results
also serve as a cheap agreement check between the two paths.
"""

from __future__ import annotations

import random
import time

import numpy as np

from . import accel

__all__ = ["run_benchmarks", "format_table"]


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _subset_cases(count: int, seed: int = 7) -> list[tuple[np.ndarray, int]]:
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        k = rng.randint(3, 24)
        items = sorted(rng.sample(range(1, 250_000), k), reverse=True)
        total = sum(items)
        cases.append((np.array(items, dtype=np.int64), rng.randint(0, total)))
    return cases


def run_benchmarks(repeat: int = 3, quick: bool = False) -> list[dict]:
    """Time each kernel pair; returns one row per kernel."""
    n_sieve = 2_000_000 if quick else 10_000_000
    n_table = 200_000 if quick else 1_000_000
    n_cases = 100 if quick else 400

    cases = _subset_cases(n_cases)

    def reach_all(impl):
        def run():
            for items, target in cases:
                impl(items, target)

        return run

    pairs = [
        ("primes_upto(%.0e)" % n_sieve, lambda: accel._primes_upto_numpy(n_sieve),
         (lambda: accel._primes_upto_numba(n_sieve)) if accel.HAVE_NUMBA else None),
        ("spf_upto(%.0e)" % n_table, lambda: accel._spf_upto_numpy(n_table),
         (lambda: accel._spf_upto_numba(n_table)) if accel.HAVE_NUMBA else None),
        ("sigma_upto(%.0e)" % n_table, lambda: accel._sigma_upto_numpy(n_table),
         (lambda: accel._sigma_upto_numba(n_table)) if accel.HAVE_NUMBA else None),
        ("subset_reachable x%d" % n_cases,
         reach_all(lambda it, t: accel._subset_reachable_numpy(it, t)),
         reach_all(lambda it, t: accel._subset_reachable_numba(it, t))
         if accel.HAVE_NUMBA else None),
    ]

    rows = []
    for name, numpy_fn, numba_fn in pairs:
        if numba_fn is not None:
            numba_fn()  # warm the JIT
            t_numba = _time(numba_fn, repeat)
        else:
            t_numba = None
        t_numpy = _time(numpy_fn, repeat)
        rows.append(
            {
                "kernel": name,
                "numpy_s": t_numpy,
                "numba_s": t_numba,
                "speedup": (t_numpy / t_numba) if t_numba else None,
            }
        )
    return rows


def format_table(rows: list[dict]) -> str:
    lines = [f"{'kernel':<28} {'numpy':>10} {'numba':>10} {'speedup':>8}"]
    for r in rows:
        numba = f"{r['numba_s']:.4f}s" if r["numba_s"] is not None else "n/a"
        speed = f"{r['speedup']:.1f}x" if r["speedup"] is not None else "-"
        lines.append(f"{r['kernel']:<28} {r['numpy_s']:>9.4f}s {numba:>10} {speed:>8}")
    if not accel.HAVE_NUMBA:
        lines.append("(numba unavailable; numpy fallback only)")
    return "\n".join(lines)
