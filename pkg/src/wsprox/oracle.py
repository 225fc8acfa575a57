"""Slow independent references that ground-truth the fast solvers.

oracle_isotonic_partition enumerates every contiguous partition of the
indices (2^(d-1) candidates) and keeps the feasible one with least squared
error; it shares no code with the collision solvers. oracle_prox_numeric
minimizes the prox objective by diminishing-step subgradient descent and is
only ever used as a loose sanity bound.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .core import as_weight_vector, subgradient_R

MAX_ORACLE_D = 20


@lru_cache(maxsize=32)
def _partition_ids(d: int):
    """Block-id matrix for all 2^(d-1) contiguous partitions of d indices.

    Row r encodes the partition whose block boundaries are the set bits of
    r; entry [r, i] is the block id of index i.
    """
    n_masks = 1 << (d - 1)
    if d == 1:
        return np.zeros((1, 1), dtype=np.int64)
    bits = (np.arange(n_masks)[:, None] >> np.arange(d - 1)[None, :]) & 1
    ids = np.concatenate(
        (np.zeros((n_masks, 1), dtype=np.int64), np.cumsum(bits, axis=1)), axis=1
    )
    return ids


@lru_cache(maxsize=32)
def _partition_onehot(d: int):
    ids = _partition_ids(d)
    return (ids[:, :, None] == np.arange(d)[None, None, :]).astype(np.float64)


def oracle_isotonic_partition(y, m=None) -> np.ndarray:
    """Brute-force weighted isotonic regression by partition enumeration."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y must be a nonempty 1-D vector")
    d = y.shape[0]
    if d > MAX_ORACLE_D:
        raise ValueError(f"oracle refuses d > {MAX_ORACLE_D} (2^(d-1) candidates)")
    if m is None:
        m = np.ones(d)
    m = np.ascontiguousarray(m, dtype=np.float64)
    if m.shape != y.shape or np.any(m <= 0):
        raise ValueError("masses must be positive and match y")
    if d == 1:
        return y.copy()
    onehot = _partition_onehot(d)  # (masks, index, block)
    sums_my = np.einsum("rib,i->rb", onehot, y * m)
    sums_m = np.einsum("rib,i->rb", onehot, m)
    # Empty blocks exist only at the tail; a large finite fill keeps the
    # nondecreasing check well-defined (inf - inf would be nan).
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(sums_m > 0, sums_my / np.where(sums_m > 0, sums_m, 1.0), 1e300)
    feasible = np.all(np.diff(means, axis=1) >= 0, axis=1)
    # SSE = const - sum_b (block weighted sum)^2 / block mass
    score = np.where(sums_m > 0, sums_my**2 / np.where(sums_m > 0, sums_m, 1.0), 0.0).sum(axis=1)
    score = np.where(feasible, score, -np.inf)
    best = int(np.argmax(score))
    ids = _partition_ids(d)[best]
    return means[best][ids]


def prox_objective(u, w, alpha: float, beta: float) -> float:
    """alpha*R(u) + beta*l1(u) + 0.5*||u - w||^2, evaluated naively."""
    from .core import eval_R

    u = np.asarray(u, dtype=np.float64)
    r = eval_R(u, mode="naive") if u.shape[0] > 1 else 0.0
    return float(alpha * r + beta * np.abs(u).sum() + 0.5 * np.sum((u - w) ** 2))


def oracle_prox_numeric(w, alpha: float, beta: float, iters: int = 20000, seed: int = 0) -> np.ndarray:
    """Approximate the composite prox by subgradient descent with step c/sqrt(t).

    Tracks the best iterate by objective value; accuracy is O(1/sqrt(iters)),
    so use it only as a coarse cross-check (~1e-3).
    """
    w = as_weight_vector(w)
    d = w.shape[0]
    if d > 64:
        raise ValueError("numeric oracle is desk-scale only (d <= 64)")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if alpha == 0.0 and beta == 0.0:
        return w.copy()
    c = 0.1 * max(float(np.linalg.norm(w)), 1e-12)
    u = w.copy()
    best = u.copy()
    best_obj = prox_objective(u, w, alpha, beta)
    for t in range(1, iters + 1):
        g = u - w
        if alpha > 0 and d > 1:
            g = g + alpha * subgradient_R(u)
        if beta > 0:
            g = g + beta * np.sign(u)
        u = u - (c / np.sqrt(t)) * g
        obj = prox_objective(u, w, alpha, beta)
        if obj < best_obj:
            best_obj = obj
            best = u.copy()
    return best
