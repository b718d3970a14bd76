"""Compare the numba edit-distance kernel against the numpy fallback.

Usage: python benchmarks/bench_levenshtein.py [--sizes 10,40,160,640]
       [--reps 200] [--seed 0]

Both backends run on identical random codepoint arrays; results are checked
for agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from sit.kernels import BACKEND, _lev_numba, _lev_numpy, warmup


def random_codepoints(rng: random.Random, length: int) -> np.ndarray:
    return np.array([rng.randrange(0x41, 0x4E80) for _ in range(length)],
                    dtype=np.int32)


def time_kernel(kernel, pairs, reps: int) -> float:
    """Seconds per call, averaged over reps runs of every pair."""
    started = time.perf_counter()
    for _ in range(reps):
        for a, b in pairs:
            kernel(a, b)
    return (time.perf_counter() - started) / (reps * len(pairs))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="10,40,160,640")
    parser.add_argument("--reps", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = random.Random(args.seed)
    warmup()

    print(f"active backend: {BACKEND}")
    print(f"{'length':>8} {'numba us':>12} {'numpy us':>12} {'speedup':>9}")
    for size in sizes:
        pairs = [(random_codepoints(rng, size), random_codepoints(rng, size))
                 for _ in range(5)]
        for a, b in pairs:
            got_nb, got_np = _lev_numba(a, b), _lev_numpy(a, b)
            if got_nb != got_np:
                print(f"MISMATCH at length {size}: numba={got_nb} numpy={got_np}")
                return 1
        reps = max(1, args.reps // max(1, size // 40))
        t_numba = time_kernel(_lev_numba, pairs, reps)
        t_numpy = time_kernel(_lev_numpy, pairs, reps)
        print(f"{size:>8} {t_numba * 1e6:>12.2f} {t_numpy * 1e6:>12.2f} "
              f"{t_numpy / t_numba:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
