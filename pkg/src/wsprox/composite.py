"""The user-facing composite prox: weight-sharing + l1 shrinkage + rewinding.

Pipeline: sort, initialize particle velocities, solve collisions, flag and
zero the blocks whose destinations land inside the l1 dead zone, shrink the
remaining displacement, scale it by (1 - rho), expand blocks and unsort.
With rho = 0 this is exactly prox of (alpha*R + beta*l1); rho rewinds each
surviving cluster toward its initial center of mass, and rho = 1 with
alpha = 0 is hard thresholding.
"""

from __future__ import annotations

import numpy as np

from .core import ProxParams, as_weight_vector, stable_sort_permutation
from .particles import (
    ClusterSolution,
    SolverStats,
    VerifyResult,
    init_particles,
    solve,
    verify_solution,
)


def prox_l1(w, beta: float) -> np.ndarray:
    """Soft-thresholding: shrink toward zero by beta, clip the dead zone."""
    w = as_weight_vector(w)
    if beta < 0:
        raise ValueError("beta must be >= 0")
    return np.sign(w) * np.maximum(np.abs(w) - beta, 0.0)


def _cluster_solution(starts, masses, values, zeroed) -> ClusterSolution:
    # Grazing blocks (exactly equal final values) merge in the report so the
    # block values are strictly increasing and the partition is canonical.
    keep = np.concatenate(([True], values[1:] != values[:-1]))
    group = np.cumsum(keep) - 1
    g_start = starts[keep]
    g_mass = np.bincount(group, weights=masses).astype(np.int64)
    g_value = values[keep]
    g_zeroed = np.zeros(g_value.shape[0], dtype=bool)
    np.logical_or.at(g_zeroed, group, zeroed)
    per_index = np.repeat(g_value, g_mass)
    return ClusterSolution(
        block_start=g_start,
        block_mass=g_mass,
        block_value=g_value,
        per_index_value=per_index,
        block_zeroed=g_zeroed,
    )


def prox_composite(
    w,
    params: ProxParams,
    algo: str = "pava",
    threads: int = 1,
    displacement_scale: float = 1.0,
):
    """Composite prox with rewinding; returns (weights, clusters, stats).

    displacement_scale multiplies the residual displacement before the
    (1 - rho) rewinding step; training loops use it to push the learning
    rate into the displacement instead of the coefficients.
    """
    w = as_weight_vector(w)
    alpha, beta, rho = params.alpha, params.beta, params.rho
    d = w.shape[0]
    if d == 1:
        # R vanishes; only the l1/rewinding branch applies.
        y = w[0]
        zeroed = abs(y) < beta
        if zeroed:
            val = 0.0
        else:
            vres = -beta * float(np.sign(y))
            val = y + (1.0 - rho) * displacement_scale * vres
        out = np.array([val])
        sol = ClusterSolution(
            block_start=np.array([0]),
            block_mass=np.array([1]),
            block_value=out.copy(),
            per_index_value=out.copy(),
            block_zeroed=np.array([zeroed]),
        )
        return out, sol, SolverStats(clusters=1)

    ps, perm = init_particles(w, alpha)
    solved, stats = solve(ps, algo=algo, threads=threads)
    heads = solved.live_indices()
    xb = solved.x[heads].copy()
    vb = solved.v[heads].copy()
    mb = solved.m[heads]
    # A block boundary can never split a run of equal sorted inputs: swapping
    # two tied coordinates leaves the problem unchanged, and the prox is
    # unique, so tied inputs must share one output value. Rounding in the
    # collision scans can still split such a run when its destinations only
    # graze, so pool any blocks whose boundary lands inside a tie run.
    if heads.shape[0] > 1:
        tied = ps.x[heads[1:] - 1] == ps.x[heads[1:]]
        if np.any(tied):
            keep = np.concatenate(([True], ~tied))
            group = np.cumsum(keep) - 1
            mf = mb.astype(np.float64)
            gm = np.bincount(group, weights=mf)
            xb = np.bincount(group, weights=xb * mf) / gm
            vb = np.bincount(group, weights=vb * mf) / gm
            mb = np.rint(gm).astype(np.int64)
            heads = heads[keep]
            stats.clusters = int(heads.shape[0])
    yb = xb + vb
    zero_mask = np.abs(yb) < beta
    vb = vb - beta * np.sign(yb)
    xb[zero_mask] = 0.0
    vb[zero_mask] = 0.0
    xb = xb + (1.0 - rho) * (displacement_scale * vb)
    starts = np.concatenate(([0], np.cumsum(mb)[:-1]))
    sol = _cluster_solution(starts, mb, xb, zero_mask)
    out = np.empty(d)
    out[perm] = sol.per_index_value
    return out, sol, stats


def prox_R(w, alpha: float, algo: str = "pava", threads: int = 1) -> np.ndarray:
    """Prox of alpha*R at w; identity for d = 1."""
    w = as_weight_vector(w)
    if w.shape[0] == 1:
        return w.copy()
    out, _, _ = prox_composite(w, ProxParams(alpha=alpha), algo=algo, threads=threads)
    return out


def verify_prox_optimality(w_in, w_out, alpha: float, tol: float = 1e-9) -> VerifyResult:
    """Certify w_out == prox of alpha*R at w_in via the cluster-mean and
    neighbour-collision conditions on the sorted destination problem."""
    w_in = as_weight_vector(w_in)
    w_out = np.ascontiguousarray(w_out, dtype=np.float64)
    if w_in.shape != w_out.shape:
        raise ValueError("w_in and w_out must have equal length")
    d = w_in.shape[0]
    if d == 1:
        ok = bool(np.isclose(w_in[0], w_out[0], rtol=0, atol=tol))
        return VerifyResult(ok, "" if ok else "d=1 prox must be the identity")
    ps, perm = init_particles(w_in, alpha)
    fit = w_out[perm]
    if np.any(np.diff(fit) < 0):
        return VerifyResult(False, "candidate is not nondecreasing in sorted order")
    return verify_solution(ps.destinations, ps.m, fit, tol=tol)
