"""Weight vectors, the pairwise-difference penalty, subgradients and metrics.

The penalty on a weight vector w of length d is the scaled sum of absolute
pairwise differences

    R(w) = (1 / (d - 1)) * sum_{i > j} |w_i - w_j|,

with R defined as 0 for d = 1. Its prox drives weights to exactly shared
values, which is why the metrics here use exact equality to count distinct
weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import chunk_bounds, parallel_cumsum, run_tasks

EVAL_MODES = ("naive", "fast", "parallel")


def as_weight_vector(values) -> np.ndarray:
    """Validate and return a contiguous float64 weight vector."""
    w = np.ascontiguousarray(values, dtype=np.float64)
    if w.ndim != 1:
        raise ValueError(f"weight vector must be 1-D, got shape {w.shape}")
    if w.size < 1:
        raise ValueError("weight vector must have length >= 1")
    if not np.all(np.isfinite(w)):
        raise ValueError("weight vector contains non-finite entries")
    return w


def stable_sort_permutation(w: np.ndarray) -> np.ndarray:
    """Permutation p with w[p] nondecreasing; ties keep original order."""
    return np.argsort(w, kind="stable")


@dataclass(frozen=True)
class ProxParams:
    """Parameters of the composite prox: alpha*R + beta*l1 with rewinding rho.

    eta is the optimizer step size; it is carried here so training configs
    have a single parameter bundle.
    """

    alpha: float = 0.0
    beta: float = 0.0
    rho: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not (self.alpha >= 0.0):
            raise ValueError("alpha must be >= 0")
        if not (self.beta >= 0.0):
            raise ValueError("beta must be >= 0")
        if not (0.0 <= self.rho <= 1.0):
            raise ValueError("rho must lie in [0, 1]")
        if not (self.eta > 0.0):
            raise ValueError("eta must be > 0")


def _eval_naive(w: np.ndarray) -> float:
    d = w.shape[0]
    # Summing in sorted order makes the result exactly permutation invariant.
    w = np.sort(w, kind="stable")
    total = 0.0
    # Row blocks keep the O(d^2) broadcast under control memory-wise.
    step = 256
    for lo in range(0, d, step):
        block = w[lo : lo + step]
        total += float(np.abs(block[:, None] - w[None, :]).sum())
    return total / (2.0 * (d - 1))


def _sorted_eval_terms(x: np.ndarray, prefix: np.ndarray) -> np.ndarray:
    # term_i = i * x_i - (prefix sum of the i earlier entries), 0-based i
    d = x.shape[0]
    idx = np.arange(d, dtype=np.float64)
    exclusive = np.concatenate(([0.0], prefix[:-1]))
    return idx * x - exclusive


def _eval_fast(w: np.ndarray) -> float:
    # The penalty is translation invariant; anchoring at the minimum keeps
    # the prefix sums from cancelling when the weights share a large offset.
    x = np.sort(w, kind="stable")
    x = x - x[0]
    terms = _sorted_eval_terms(x, np.cumsum(x))
    return float(np.sum(terms)) / (w.shape[0] - 1)


def _eval_parallel(w: np.ndarray, threads: int) -> float:
    x = np.sort(w, kind="stable")
    x = x - x[0]
    prefix = parallel_cumsum(x, threads)
    terms = _sorted_eval_terms(x, prefix)
    # Fixed-shape reduction: per-chunk sums, then one pairwise combine.
    bounds = chunk_bounds(terms.shape[0])
    partial = np.zeros(bounds.shape[0] - 1)

    def reduce_chunk(k):
        partial[k] = np.sum(terms[bounds[k] : bounds[k + 1]])

    run_tasks([lambda k=k: reduce_chunk(k) for k in range(partial.shape[0])], threads)
    return float(np.sum(partial)) / (w.shape[0] - 1)


def eval_R(w, mode: str = "fast", threads: int = 1) -> float:
    """Evaluate the pairwise-difference penalty.

    mode "naive" is the quadratic double loop, "fast" sorts and uses prefix
    sums (O(d log d) work), "parallel" is the fast form built only from
    map/scan/reduce primitives with a fixed tree shape.
    """
    w = as_weight_vector(w)
    if mode not in EVAL_MODES:
        raise ValueError(f"unknown eval mode {mode!r}")
    if w.shape[0] == 1:
        return 0.0
    if mode == "naive":
        return _eval_naive(w)
    if mode == "fast":
        return _eval_fast(w)
    return _eval_parallel(w, threads)


def sorted_subgradient_coefficients(d: int) -> np.ndarray:
    """Gradient of the active sorting hyperplane, in sorted position order.

    c_i = (2i - d - 1) / (d - 1) for 1-based position i; the entries sum
    to zero.
    """
    if d < 2:
        raise ValueError("need d >= 2 for subgradient coefficients")
    i = np.arange(1, d + 1, dtype=np.float64)
    return (2.0 * i - d - 1.0) / (d - 1.0)


def subgradient_R(w) -> np.ndarray:
    """Canonical subgradient of R at w (stable-sort tie breaking)."""
    w = as_weight_vector(w)
    d = w.shape[0]
    if d < 2:
        raise ValueError("subgradient requires d >= 2")
    perm = stable_sort_permutation(w)
    g = np.empty(d)
    g[perm] = sorted_subgradient_coefficients(d)
    return g


@dataclass(frozen=True)
class Metrics:
    sparsity: float
    distinct_nonzero: int
    nonzero_count: int
    weight_sharing: float
    distinct_ratio: float


def metrics(w, zero_tol: float = 0.0) -> Metrics:
    """Sparsity and weight-sharing statistics of a weight vector.

    Entries with |w_i| <= zero_tol count as zero. Distinctness among the
    remaining entries is exact equality: the prox produces exactly tied
    values, so exact comparison is the meaningful one. weight_sharing is
    1 - distinct/nonzero; the raw ratio is also reported.
    """
    w = as_weight_vector(w)
    if zero_tol < 0:
        raise ValueError("zero_tol must be >= 0")
    d = w.shape[0]
    nonzero = w[np.abs(w) > zero_tol]
    n_nonzero = int(nonzero.shape[0])
    sparsity = 1.0 - n_nonzero / d
    if n_nonzero == 0:
        return Metrics(sparsity=sparsity, distinct_nonzero=0, nonzero_count=0,
                       weight_sharing=0.0, distinct_ratio=0.0)
    distinct = int(np.unique(nonzero).shape[0])
    ratio = distinct / n_nonzero
    return Metrics(sparsity=sparsity, distinct_nonzero=distinct,
                   nonzero_count=n_nonzero, weight_sharing=1.0 - ratio,
                   distinct_ratio=ratio)
