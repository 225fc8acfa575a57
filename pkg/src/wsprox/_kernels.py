"""Numba kernels for the particle-collision solvers.

All kernels operate in place on (x, v, m) arrays. Mass m[i] == 0 marks a
hole left behind by a merge; its x and v entries are never read. Ties in
the prefix-average argmin break toward the largest index, so grazing
contacts merge.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BIG = np.inf


@njit(cache=True, nogil=True)
def pava_inplace(x, v, m):
    """Sequential adjacent-violator pooling; merges when destinations touch.

    Returns (n_blocks, work_ops).
    """
    n = x.shape[0]
    heads = np.empty(n, np.int64)
    bx = np.empty(n, np.float64)
    bv = np.empty(n, np.float64)
    bm = np.empty(n, np.int64)
    k = 0
    ops = 0
    for i in range(n):
        if m[i] == 0:
            continue
        cx = x[i] * m[i]
        cv = v[i] * m[i]
        cm = m[i]
        h = i
        while k > 0 and (bx[k - 1] + bv[k - 1]) / bm[k - 1] >= (cx + cv) / cm:
            k -= 1
            cx += bx[k]
            cv += bv[k]
            cm += bm[k]
            h = heads[k]
            ops += 1
        heads[k] = h
        bx[k] = cx
        bv[k] = cv
        bm[k] = cm
        k += 1
        ops += 1
    for i in range(n):
        m[i] = 0
    for t in range(k):
        h = heads[t]
        x[h] = bx[t] / bm[t]
        v[h] = bv[t] / bm[t]
        m[h] = bm[t]
    return k, ops


@njit(cache=True, nogil=True)
def rightmost_collision_kernel(x, v, m, i, end):
    """argmin over k in [i, end) of the mass-weighted mean of x+v on [i, k].

    Holes are excluded as candidates but contribute nothing to the sums.
    Ties break toward the largest index.
    """
    best = i
    bestval = BIG
    sy = 0.0
    sm = 0.0
    for k in range(i, end):
        sy += (x[k] + v[k]) * m[k]
        sm += m[k]
        if m[k] > 0:
            a = sy / sm
            if a <= bestval:
                bestval = a
                best = k
    return best


@njit(cache=True, nogil=True)
def perform_collisions_inplace(x, v, m, i, j):
    """Merge particles i..j (inclusive) into a single particle at i."""
    sx = 0.0
    sv = 0.0
    sm = 0
    for k in range(i, j + 1):
        sx += x[k] * m[k]
        sv += v[k] * m[k]
        sm += m[k]
        m[k] = 0
    x[i] = sx / sm
    v[i] = sv / sm
    m[i] = sm


@njit(cache=True, nogil=True)
def graze_cleanup_inplace(x, v, m):
    """Pool adjacent live blocks whose stored destinations touch.

    Prefix-mean collision scans can miss a grazing contact when an
    intermediate mean rounds one ulp past the tie (e.g. nine equal values:
    sums of 1, 2, 4, 8 copies are exact but nine are not), leaving two
    blocks with equal destinations. Pooling the stored block values
    restores strictly increasing destinations and leaves every untouched
    block bit-identical. Returns the number of merges performed.
    """
    n = x.shape[0]
    heads = np.empty(n, np.int64)
    k = 0
    merges = 0
    for i in range(n):
        if m[i] == 0:
            continue
        heads[k] = i
        k += 1
        while k > 1:
            a = heads[k - 2]
            b = heads[k - 1]
            if x[a] + v[a] < x[b] + v[b]:
                break
            sm = m[a] + m[b]
            x[a] = (x[a] * m[a] + x[b] * m[b]) / sm
            v[a] = (v[a] * m[a] + v[b] * m[b]) / sm
            m[a] = sm
            m[b] = 0
            k -= 1
            merges += 1
    return merges


@njit(cache=True, nogil=True)
def _merge_halves(x, v, m, lo, mid, hi):
    """Resolve the single possible cross-boundary collision chain.

    Both halves [lo, mid) and [mid, hi) must already be solved. Binary
    search finds the leftmost particle whose rightmost collision crosses
    the midline, then one collision chain is performed.

    Returns (probes, work_ops).
    """
    has_left = False
    for k in range(lo, mid):
        if m[k] > 0:
            has_left = True
            break
    has_right = False
    for k in range(mid, hi):
        if m[k] > 0:
            has_right = True
            break
    if not (has_left and has_right):
        return 0, 0

    probes = 0
    ops = 0
    size = hi - lo
    # candidate positions [le, ri - 1] within the left half
    le = lo
    ri = mid
    steps = 0
    s = size
    while s > 2:  # log2(size) - 1 binary-search steps
        s >>= 1
        steps += 1
    for _ in range(steps):
        p = (le + ri - 1) // 2
        q = p
        while q >= lo and m[q] == 0:
            q -= 1
        if q < lo:
            crosses = False
        else:
            probes += 1
            ops += hi - q
            j = rightmost_collision_kernel(x, v, m, q, hi)
            crosses = j >= mid
        if crosses:
            ri = p + 1
        else:
            le = p + 1
    q = le if le < mid else mid - 1
    while q >= lo and m[q] == 0:
        q -= 1
    if q >= lo:
        probes += 1
        ops += hi - q
        j = rightmost_collision_kernel(x, v, m, q, hi)
        if j > q and j >= mid:
            perform_collisions_inplace(x, v, m, q, j)
    return probes, ops


@njit(cache=True, nogil=True)
def solve_levels(x, v, m, base, length, lev_lo, lev_hi):
    """Bottom-up divide-and-conquer merges over [base, base+length).

    Level L merges solved blocks of size 2^(L-1) pairwise. length must be
    a multiple of 2^lev_hi. Returns (max_probes_per_merge, work_ops).
    """
    maxp = 0
    ops = 0
    for lev in range(lev_lo, lev_hi + 1):
        bs = 1 << lev
        b = base
        while b < base + length:
            p, o = _merge_halves(x, v, m, b, b + (bs >> 1), b + bs)
            if p > maxp:
                maxp = p
            ops += o
            b += bs
    return maxp, ops
