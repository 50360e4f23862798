#!/usr/bin/env python3
"""Benchmark: compiled feasibility kernel vs the pure-Python twin.

Runs identical alternating-projection problems (random unbiased qubit
pairs, Lueders warm start) through roilab._jm_kernel and roilab._jm_pure,
checks that verdicts and iteration counts agree exactly, and reports
per-iteration cost and total speedup.

Usage: python benchmarks/bench_jm.py [n_pairs]
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from roilab import _jm_pure  # noqa: E402
from roilab.jointmeas import HAVE_KERNEL, _coords, _joint_to_flat, lueders_candidate  # noqa: E402
from roilab.linalg import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z  # noqa: E402
from roilab.measurements import BinaryPovm  # noqa: E402

if HAVE_KERNEL:
    from roilab import _jm_kernel
else:
    _jm_kernel = None

TOL = 1e-8
MAX_ITER = 100_000


def random_unbiased(rng):
    m = rng.normal(size=3)
    m *= rng.uniform() ** (1.0 / 3.0) / np.linalg.norm(m)
    e = 0.5 * (ID2 + m[0] * SIGMA_X + m[1] * SIGMA_Y + m[2] * SIGMA_Z)
    return BinaryPovm(e, ID2 - e)


def make_problems(n, seed=2718):
    rng = np.random.default_rng(seed)
    problems = []
    for _ in range(n):
        p = random_unbiased(rng)
        q = random_unbiased(rng)
        problems.append(
            (
                _joint_to_flat(lueders_candidate(p, q)),
                _coords(p.plus),
                _coords(q.plus),
            )
        )
    return problems


def run_pure(problems):
    results = []
    start = time.perf_counter()
    for flat, p4, q4 in problems:
        results.append(_jm_pure.alternate(list(flat), p4, q4, TOL, MAX_ITER))
    return time.perf_counter() - start, results


def run_compiled(problems):
    results = []
    start = time.perf_counter()
    for flat, p4, q4 in problems:
        g = np.array(flat, dtype=float)
        results.append(
            _jm_kernel.alternate(g, np.array(p4, dtype=float), np.array(q4, dtype=float), TOL, MAX_ITER)
        )
    return time.perf_counter() - start, results


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 500
    problems = make_problems(n)
    pure_time, pure_results = run_pure(problems)
    iterations = sum(r[2] for r in pure_results)
    feasible = sum(1 for r in pure_results if r[0])
    print(f"problems: {n} (feasible {feasible}), total iterations {iterations}")
    print(f"pure python : {pure_time:8.3f} s  ({1e9 * pure_time / iterations:8.1f} ns/iter)")
    if _jm_kernel is None:
        print("compiled kernel not built; run `python setup.py build_ext --inplace`")
        return
    fast_time, fast_results = run_compiled(problems)
    mismatches = sum(
        1
        for a, b in zip(pure_results, fast_results)
        if bool(a[0]) != bool(b[0]) or a[2] != b[2]
    )
    print(f"compiled    : {fast_time:8.3f} s  ({1e9 * fast_time / iterations:8.1f} ns/iter)")
    print(f"speedup     : {pure_time / fast_time:8.1f}x   verdict/iteration mismatches: {mismatches}")


if __name__ == "__main__":
    main()
