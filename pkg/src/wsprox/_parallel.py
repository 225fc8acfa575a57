"""Fork-join helpers with a fixed task decomposition.

The chunk layout is a function of the input size only, never of the thread
count, so results are bit-identical whether tasks run on 1 or N workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# Fixed fan-out of the reduction/scan tree. Chosen once; changing it changes
# floating-point results, so it is not configurable at runtime.
N_CHUNKS = 64

DEFAULT_THREADS_ENV = "WSPROX_THREADS"


def default_threads() -> int:
    raw = os.environ.get(DEFAULT_THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def chunk_bounds(n: int) -> np.ndarray:
    """Chunk boundaries for an array of length n (length N_CHUNKS+1)."""
    return np.linspace(0, n, N_CHUNKS + 1).astype(np.int64)


def run_tasks(tasks, threads: int) -> list:
    """Run callables, possibly on a thread pool; list of results in order."""
    if threads <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]


def parallel_cumsum(a: np.ndarray, threads: int = 1) -> np.ndarray:
    """Inclusive prefix sum with a fixed two-level scan tree.

    Per-chunk cumsum (map), exclusive scan over chunk totals, offset add.
    The tree shape is fixed by N_CHUNKS, so the result does not depend on
    the thread count.
    """
    n = a.shape[0]
    if n == 0:
        return a.copy()
    bounds = chunk_bounds(n)
    out = np.empty_like(a)

    def scan_chunk(k):
        lo, hi = bounds[k], bounds[k + 1]
        np.cumsum(a[lo:hi], out=out[lo:hi])

    run_tasks([lambda k=k: scan_chunk(k) for k in range(N_CHUNKS)], threads)
    totals = np.zeros(N_CHUNKS, dtype=a.dtype)
    for k in range(N_CHUNKS):
        if bounds[k + 1] > bounds[k]:
            totals[k] = out[bounds[k + 1] - 1]
    offsets = np.concatenate(([0], np.cumsum(totals)[:-1]))

    def add_offset(k):
        lo, hi = bounds[k], bounds[k + 1]
        if offsets[k] != 0:
            out[lo:hi] += offsets[k]

    run_tasks([lambda k=k: add_offset(k) for k in range(N_CHUNKS)], threads)
    return out
