"""Exact proximal operators for weight-sharing and sparsity regularization.

The penalty R(w) = (1/(d-1)) * sum_{i>j} |w_i - w_j| has a prox computable
exactly by simulating sticky-particle collisions on the sorted weights.
This package provides the penalty, four collision solvers (including a
low-depth parallel divide-and-conquer one), the composite prox with l1 and
rewinding, certificate checkers, brute-force oracles, a proximal-gradient
optimizer, and a CLI.
"""

__version__ = "0.1.0"

from .core import (
    Metrics,
    ProxParams,
    as_weight_vector,
    eval_R,
    metrics,
    sorted_subgradient_coefficients,
    stable_sort_permutation,
    subgradient_R,
)
from .particles import (
    ClusterSolution,
    ParticleSystem,
    SolverStats,
    VerifyResult,
    init_particles,
    isotonic_fit,
    perform_collisions,
    rightmost_collision,
    solve,
    solve_end,
    solve_imminent,
    solve_pava,
    solve_search,
    verify_solution,
)
from .composite import prox_R, prox_composite, prox_l1, verify_prox_optimality
from .oracle import oracle_isotonic_partition, oracle_prox_numeric, prox_objective
from .optimizer import (
    RegressionData,
    TrainConfig,
    Trajectory,
    demo_clustered_lasso,
    exact_cluster_recovery,
    gen_clustered_regression,
    least_squares_oracles,
    proximal_gd,
    subgradient_gd,
)
from .cli import gen_adversarial_staircase, run_benchmark, run_selftest

__all__ = [name for name in dir() if not name.startswith("_")]
