"""Edit-distance kernels.

The character edit distance is the one numeric hot loop in the harness: the
raw metric runs an O(n*m) DP over every (original, variant) target pair, which
is thousands of comparisons per corpus. Two interchangeable implementations
live here:

* a numba ``@njit`` kernel (default when numba imports),
* a vectorized pure-numpy row-DP fallback.

Set ``SIT_PURE_NUMPY=1`` to force the numpy path. ``BACKEND`` names the
active one. ``benchmarks/bench_levenshtein.py`` compares both.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        return wrap


def codepoints(s: str) -> np.ndarray:
    """Unicode scalar values of ``s`` as an int32 array."""
    if not s:
        return np.empty(0, dtype=np.int32)
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.int32)


@njit(cache=True)
def _lev_numba(a: np.ndarray, b: np.ndarray) -> int:
    n = b.shape[0]
    prev = np.arange(n + 1, dtype=np.int32)
    cur = np.empty(n + 1, dtype=np.int32)
    for i in range(1, a.shape[0] + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, n + 1):
            sub = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            dele = prev[j] + 1
            ins = cur[j - 1] + 1
            best = dele if dele < ins else ins
            if sub < best:
                best = sub
            cur[j] = best
        prev, cur = cur, prev
    return int(prev[n])


def _lev_numpy(a: np.ndarray, b: np.ndarray) -> int:
    # Row DP; the insertion chain cur[j] = min(cand[j], cur[j-1]+1) unrolls to
    # a running minimum of cand[k] - k, so one cumulative min per row suffices.
    n = b.size
    idx = np.arange(n + 1, dtype=np.int64)
    prev = idx.copy()
    for i in range(1, a.size + 1):
        row = np.empty(n + 1, dtype=np.int64)
        row[0] = i
        row[1:] = np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i - 1]))
        prev = idx + np.minimum.accumulate(row - idx)
    return int(prev[n])


_FORCE_NUMPY = os.environ.get("SIT_PURE_NUMPY", "") not in ("", "0")
BACKEND = "numba" if (_HAS_NUMBA and not _FORCE_NUMPY) else "numpy"
_kernel = _lev_numba if BACKEND == "numba" else _lev_numpy


def levenshtein_codepoints(a: np.ndarray, b: np.ndarray) -> int:
    """Edit distance between two codepoint arrays via the active backend."""
    if a.size == 0:
        return int(b.size)
    if b.size == 0:
        return int(a.size)
    return _kernel(a, b)


def warmup() -> None:
    """Trigger JIT compilation (a no-op on the numpy path)."""
    _kernel(np.array([1], dtype=np.int32), np.array([2], dtype=np.int32))
