"""Particle systems and the collision solvers behind the prox of R.

Sorted weights become sticky unit-mass particles; velocities are the scaled
negative subgradient coefficients. Destinations y = x + v cross exactly
where the prox ties weights, so solving the collisions solves the prox.
The same machinery solves weighted isotonic regression (x = y, v = 0).

Four solvers share one contract and one tie policy (grazing contacts
merge): a sequential stack-based pooler, a round-based parallel pooler, a
rightmost-prefix extractor, and a divide-and-conquer binary-search merger.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from ._parallel import run_tasks
from .core import as_weight_vector, sorted_subgradient_coefficients, stable_sort_permutation

SOLVERS = ("pava", "imminent", "end", "search")

# Fixed subtree fan-out for the threaded divide-and-conquer solver. The
# decomposition depends only on the input size, so outputs are bit-identical
# across thread counts.
_SPLIT_LEVELS = 4


@dataclass
class ParticleSystem:
    """Positions, velocities and integer masses; m == 0 marks a hole."""

    x: np.ndarray
    v: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.v = np.ascontiguousarray(self.v, dtype=np.float64)
        self.m = np.ascontiguousarray(self.m, dtype=np.int64)
        n = self.x.shape[0]
        if self.v.shape[0] != n or self.m.shape[0] != n:
            raise ValueError("x, v, m must have equal length")
        if n == 0:
            raise ValueError("empty particle system")
        if np.any(self.m < 0):
            raise ValueError("masses must be nonnegative")
        live = self.m > 0
        if not live.any():
            raise ValueError("particle system has no mass")
        if not (np.all(np.isfinite(self.x[live])) and np.all(np.isfinite(self.v[live]))):
            raise ValueError("non-finite position or velocity")
        # Prox-initialized systems have nondecreasing live positions; the
        # isotonic front-end feeds arbitrary y as positions, so sortedness
        # is a convention of the prox path rather than a hard invariant.

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def destinations(self) -> np.ndarray:
        return self.x + self.v

    def live_indices(self) -> np.ndarray:
        return np.flatnonzero(self.m > 0)

    def total_mass(self) -> int:
        return int(self.m.sum())

    def total_momentum(self) -> float:
        live = self.m > 0
        return float(np.sum(self.v[live] * self.m[live]))

    def copy(self) -> "ParticleSystem":
        return ParticleSystem(self.x.copy(), self.v.copy(), self.m.copy())


@dataclass
class SolverStats:
    """Counters backing the round/depth/probe complexity evidence."""

    rounds: int = 0
    merge_rounds: int = 0
    clusters: int = 0
    recursion_depth: int = 0
    probes_per_merge_max: int = 0
    total_work_ops: int = 0
    wall_time: float = 0.0

    def deterministic_fields(self) -> dict:
        d = self.__dict__.copy()
        d.pop("wall_time")
        return d


@dataclass
class ClusterSolution:
    """Contiguous blocks of sorted indices sharing one final value each."""

    block_start: np.ndarray
    block_mass: np.ndarray
    block_value: np.ndarray
    per_index_value: np.ndarray
    block_zeroed: np.ndarray = field(default=None)


def init_particles(w, alpha: float):
    """Particles for prox of alpha*R at w: sorted positions, velocities
    -alpha * (subgradient coefficients), unit masses. Momentum sums to 0."""
    w = as_weight_vector(w)
    if w.shape[0] < 2:
        raise ValueError("need d >= 2 to initialize particles")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    perm = stable_sort_permutation(w)
    x = w[perm]
    v = -alpha * sorted_subgradient_coefficients(w.shape[0])
    m = np.ones(w.shape[0], dtype=np.int64)
    return ParticleSystem(x, v, m), perm


def rightmost_collision(ps: ParticleSystem, i: int, limit: int | None = None) -> int:
    """Largest-index argmin of mass-weighted prefix averages of x+v on
    [i, limit] (inclusive); holes are masked out of the candidate set."""
    n = ps.n
    if limit is None:
        limit = n - 1
    if not (0 <= i <= limit < n):
        raise ValueError("index out of range")
    if ps.m[i] == 0:
        raise ValueError("rightmost_collision requires a live particle at i")
    return int(_kernels.rightmost_collision_kernel(ps.x, ps.v, ps.m, i, limit + 1))


def perform_collisions(ps: ParticleSystem, i: int, j: int) -> ParticleSystem:
    """Merge particles i..j (inclusive) into one at index i; pure."""
    if not (0 <= i <= j < ps.n):
        raise ValueError("index out of range")
    if ps.m[i : j + 1].sum() == 0:
        raise ValueError("cannot merge an all-hole range")
    out = ps.copy()
    _kernels.perform_collisions_inplace(out.x, out.v, out.m, i, j)
    return out


def _finish(ps_out: ParticleSystem, stats: SolverStats, t0: float):
    stats.clusters = int(np.count_nonzero(ps_out.m))
    stats.wall_time = time.perf_counter() - t0
    return ps_out, stats


def solve_pava(ps: ParticleSystem):
    """Sequential left-to-right pooling; O(n) after the destinations exist."""
    t0 = time.perf_counter()
    out = ps.copy()
    _, ops = _kernels.pava_inplace(out.x, out.v, out.m)
    stats = SolverStats(total_work_ops=int(ops))
    return _finish(out, stats, t0)


def solve_imminent(ps: ParticleSystem):
    """Repeated rounds of simultaneous adjacent merges until a fixpoint.

    Each round labels particles by a prefix sum over the strict-increase
    indicator of destinations and scatter-adds mass-weighted sums per label.
    stats.rounds counts all rounds including the final no-merge check;
    stats.merge_rounds counts rounds that merged something.
    """
    t0 = time.perf_counter()
    if np.any(ps.m == 0):
        raise ValueError("solve_imminent expects a fresh system without holes")
    x = ps.x.copy()
    v = ps.v.copy()
    m = ps.m.astype(np.float64)
    starts = np.arange(ps.n, dtype=np.int64)
    rounds = 0
    merge_rounds = 0
    ops = 0
    while True:
        rounds += 1
        k = x.shape[0]
        ops += k
        y = x + v
        grow = np.empty(k, dtype=np.int64)
        grow[0] = 0
        grow[1:] = (y[:-1] < y[1:]).astype(np.int64)
        ids = np.cumsum(grow)
        nk = int(ids[-1]) + 1
        if nk == k:
            break
        merge_rounds += 1
        sm = np.bincount(ids, weights=m)
        x = np.bincount(ids, weights=x * m) / sm
        v = np.bincount(ids, weights=v * m) / sm
        first = np.flatnonzero(np.diff(np.concatenate(([-1], ids))))
        starts = starts[first]
        m = sm
    out_x = np.zeros(ps.n)
    out_v = np.zeros(ps.n)
    out_m = np.zeros(ps.n, dtype=np.int64)
    out_x[starts] = x
    out_v[starts] = v
    out_m[starts] = np.rint(m).astype(np.int64)
    stats = SolverStats(rounds=rounds, merge_rounds=merge_rounds, total_work_ops=int(ops))
    return _finish(ParticleSystem(out_x, out_v, out_m), stats, t0)


def solve_end(ps: ParticleSystem):
    """Repeatedly extract the leading closed group via its rightmost collision."""
    t0 = time.perf_counter()
    if np.any(ps.m == 0):
        raise ValueError("solve_end expects a fresh system without holes")
    out = ps.copy()
    n = out.n
    i = 0
    iterations = 0
    ops = 0
    while i < n:
        iterations += 1
        ops += n - i
        j = int(_kernels.rightmost_collision_kernel(out.x, out.v, out.m, i, n))
        if j > i:
            _kernels.perform_collisions_inplace(out.x, out.v, out.m, i, j)
        i = j + 1
    merges = int(_kernels.graze_cleanup_inplace(out.x, out.v, out.m))
    stats = SolverStats(total_work_ops=int(ops))
    ps_out, stats = _finish(out, stats, t0)
    assert stats.clusters == iterations - merges
    return ps_out, stats


def solve_search(ps: ParticleSystem, threads: int = 1):
    """Divide-and-conquer solver: solve halves, then binary-search the one
    possible cross-boundary collision chain at each merge level.

    The input is padded on the right with zero-mass sentinels to a power of
    two; sentinels are masked everywhere and can never absorb mass. The
    bottom levels run as a fixed set of independent subtree tasks (fork-join
    over disjoint ranges), so outputs are bit-identical for any thread count.
    """
    t0 = time.perf_counter()
    if np.any(ps.m == 0):
        raise ValueError("solve_search expects a fresh system without holes")
    n = ps.n
    npad = 1 << max(0, (n - 1).bit_length())
    levels = npad.bit_length() - 1  # log2(npad)
    x = np.zeros(npad)
    v = np.zeros(npad)
    m = np.zeros(npad, dtype=np.int64)
    x[:n] = ps.x
    v[:n] = ps.v
    m[:n] = ps.m
    max_probes = 0
    ops = 0
    if levels > 0:
        split = min(_SPLIT_LEVELS, levels)
        sub_levels = levels - split
        sub_size = npad >> split
        results = [None] * (1 << split)
        if sub_levels > 0:

            def subtree(t):
                base = t * sub_size
                results[t] = _kernels.solve_levels(x, v, m, base, sub_size, 1, sub_levels)

            run_tasks([lambda t=t: subtree(t) for t in range(1 << split)], threads)
            for p, o in results:
                max_probes = max(max_probes, int(p))
                ops += int(o)
        p, o = _kernels.solve_levels(x, v, m, 0, npad, sub_levels + 1, levels)
        max_probes = max(max_probes, int(p))
        ops += int(o)
    _kernels.graze_cleanup_inplace(x, v, m)
    out = ParticleSystem(x[:n], v[:n], m[:n])
    stats = SolverStats(recursion_depth=levels, probes_per_merge_max=max_probes,
                        total_work_ops=ops)
    return _finish(out, stats, t0)


def get_solver(name: str):
    if name == "pava":
        return solve_pava
    if name == "imminent":
        return solve_imminent
    if name == "end":
        return solve_end
    if name == "search":
        return solve_search
    raise ValueError(f"unknown solver {name!r}")


def solve(ps: ParticleSystem, algo: str = "pava", threads: int = 1):
    if algo == "search":
        return solve_search(ps, threads=threads)
    return get_solver(algo)(ps)


def cluster_values(ps: ParticleSystem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(starts, masses, destinations) of the surviving blocks, left to right."""
    heads = ps.live_indices()
    return heads, ps.m[heads], ps.x[heads] + ps.v[heads]


def expand_to_indices(ps: ParticleSystem, values: np.ndarray) -> np.ndarray:
    """Scatter one value per surviving block to all indices it covers."""
    heads = ps.live_indices()
    return np.repeat(values, ps.m[heads])


def isotonic_fit(y, m=None, algo: str = "pava", threads: int = 1) -> np.ndarray:
    """Weighted isotonic regression: minimize sum m_i (y_i - x_i)^2 with x
    nondecreasing. Returns per-index fitted values (block means)."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y must be a nonempty 1-D vector")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite entries")
    if m is None:
        m = np.ones(y.shape[0], dtype=np.int64)
    else:
        m = np.ascontiguousarray(m, dtype=np.int64)
        if m.shape != y.shape or np.any(m <= 0):
            raise ValueError("masses must be positive and match y")
    ps = ParticleSystem(y.copy(), np.zeros_like(y), m.copy())
    solved, _ = solve(ps, algo=algo, threads=threads)
    heads = solved.live_indices()
    fitted_blocks = solved.x[heads] + solved.v[heads]
    counts = np.diff(np.concatenate((heads, [y.shape[0]])))
    return np.repeat(fitted_blocks, counts)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _prefix_average_bounds(y: np.ndarray, m: np.ndarray):
    """left_max[i] = max_{j<=i} avg(y_{j:i}); right_min[i] = min_{j>=i} avg(y_{i:j}).

    O(d^2) via cumulative sums; intended for desk-scale certification.
    """
    d = y.shape[0]
    c = np.concatenate(([0.0], np.cumsum(y * m)))
    cm = np.concatenate(([0.0], np.cumsum(m)))
    left_max = np.empty(d)
    right_min = np.empty(d)
    for i in range(d):
        seg = (c[i + 1] - c[: i + 1]) / (cm[i + 1] - cm[: i + 1])
        left_max[i] = seg.max()
        seg = (c[i + 1 :] - c[i]) / (cm[i + 1 :] - cm[i])
        right_min[i] = seg.min()
    return left_max, right_min


def verify_solution(y, m, fit, tol: float = 1e-9) -> VerifyResult:
    """Certify an isotonic fit without re-solving.

    Checks (a) every block value equals the mass-weighted mean of y over
    the block, (b) each within-block adjacent pair satisfies the neighbour
    collision condition max-left-average >= min-right-average, and (c) the
    condition fails across block boundaries.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    fit = np.ascontiguousarray(fit, dtype=np.float64)
    if m is None:
        m = np.ones(y.shape[0], dtype=np.float64)
    m = np.ascontiguousarray(m, dtype=np.float64)
    if y.shape != fit.shape or y.shape != m.shape:
        raise ValueError("y, m, fit must have equal length")
    d = y.shape[0]
    if np.any(np.diff(fit) < 0):
        return VerifyResult(False, "fit is not nondecreasing")
    # All checks are translation invariant, so anchor at y[0] and scale the
    # tolerance to the data magnitude; this keeps constant and near-constant
    # inputs from tripping on cumulative-sum rounding noise.
    shift = float(y[0])
    ys = y - shift
    tol = tol * max(1.0, float(np.abs(y).max()))
    starts = np.concatenate(([0], np.flatnonzero(np.diff(fit) != 0) + 1))
    ends = np.concatenate((starts[1:], [d]))
    for s, e in zip(starts, ends):
        mean = shift + float(np.sum(ys[s:e] * m[s:e]) / np.sum(m[s:e]))
        if abs(fit[s] - mean) > tol:
            return VerifyResult(
                False,
                f"block-mean: block [{s},{e}) has value {fit[s]!r} but mean {mean!r}",
            )
    if d == 1:
        return VerifyResult(True)
    left_max, right_min = _prefix_average_bounds(ys, m)
    left_max += shift
    right_min += shift
    within = fit[:-1] == fit[1:]
    for i in range(d - 1):
        collides = left_max[i] >= right_min[i + 1] - tol
        separated = left_max[i] < right_min[i + 1] + tol
        if within[i] and not collides:
            return VerifyResult(
                False,
                f"within-block-collision: pair ({i},{i + 1}) fails "
                f"max-left {left_max[i]!r} >= min-right {right_min[i + 1]!r}",
            )
        if not within[i] and not separated:
            return VerifyResult(
                False,
                f"between-block-separation: pair ({i},{i + 1}) collides "
                f"(max-left {left_max[i]!r} >= min-right {right_min[i + 1]!r})",
            )
    return VerifyResult(True)
