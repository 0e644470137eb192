"""Timing harness for the two hot kernels, numpy path vs numba path.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Backend selection happens per call through CHAINFOLD_NO_NUMBA, so one
process can time both paths. The first numba call pays the JIT compile;
a warmup call keeps that out of the measured window.
"""

import os
import time

import numpy as np

from chainfold import kernels
from chainfold.copier import run_copy
from chainfold.encoding import default_registry, tape_from_kinds

MATCH_TRIALS = 5_000_000
TAPE_LENGTH = 2048
REPEATS = 3


def _with_backend(flag_off: bool, fn):
    old = os.environ.pop(kernels.ENV_FLAG, None)
    if flag_off:
        os.environ[kernels.ENV_FLAG] = "1"
    try:
        return fn()
    finally:
        os.environ.pop(kernels.ENV_FLAG, None)
        if old is not None:
            os.environ[kernels.ENV_FLAG] = old


def bench_count_matches(force_numpy: bool):
    rng = np.random.default_rng(11)
    draws = rng.integers(0, 6, size=(MATCH_TRIALS, 5), dtype=np.uint8)
    target = rng.integers(0, 6, size=5, dtype=np.uint8)

    def run():
        kernels.count_matches(draws[:1000], target)  # warmup / compile
        best = float("inf")
        hits = 0
        for _ in range(REPEATS):
            t0 = time.perf_counter()
            hits = kernels.count_matches(draws, target)
            best = min(best, time.perf_counter() - t0)
        return hits, best

    return _with_backend(force_numpy, run)


def bench_copier(force_numpy: bool):
    rng = np.random.default_rng(12)
    pool = default_registry().kinds
    tape = tape_from_kinds([pool[i] for i in rng.integers(0, 6, TAPE_LENGTH)])

    def run():
        run_copy(tape[:8], seed=0)  # warmup / compile
        best = float("inf")
        cycles = 0
        for _ in range(REPEATS):
            t0 = time.perf_counter()
            out = run_copy(tape, seed=0)
            best = min(best, time.perf_counter() - t0)
            cycles = out.cycles
        return cycles, best

    return _with_backend(force_numpy, run)


def main():
    backends = [("numpy", True)]
    if kernels.numba_available():
        backends.append(("numba", False))
    else:
        print("numba not installed; timing the numpy path only")

    print(f"count_matches: {MATCH_TRIALS:,} draws x 5")
    results = {}
    for name, off in backends:
        hits, dt = bench_count_matches(off)
        results[name] = hits
        print(f"  {name:<6} {dt * 1e3:8.1f} ms   ({MATCH_TRIALS / dt / 1e6:7.1f} M draws/s, hits={hits})")
    if len(results) == 2:
        assert results["numpy"] == results["numba"], "backend hit counts diverged"

    print(f"copier_chunk via run_copy: tape of {TAPE_LENGTH} slots")
    cycles_seen = {}
    for name, off in backends:
        cycles, dt = bench_copier(off)
        cycles_seen[name] = cycles
        print(f"  {name:<6} {dt * 1e3:8.1f} ms   ({cycles / dt / 1e6:7.2f} M cycles/s, cycles={cycles})")
    if len(cycles_seen) == 2:
        assert cycles_seen["numpy"] == cycles_seen["numba"], "backend cycle counts diverged"


if __name__ == "__main__":
    main()
