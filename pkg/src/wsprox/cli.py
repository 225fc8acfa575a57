"""Command-line surface: prox/isotonic solves from files, benchmarks,
the clustered-lasso demo, self-tests and generators.

Exit codes: 0 ok, 1 usage error, 2 invalid input, 3 selftest failure.
Data outputs are byte-identical for a fixed seed and thread count;
timings are reported but excluded from that guarantee.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__, io
from ._parallel import default_threads
from .composite import prox_composite, prox_R, verify_prox_optimality
from .core import ProxParams, eval_R, metrics
from .optimizer import TrainConfig, demo_clustered_lasso, gen_clustered_regression
from .oracle import oracle_isotonic_partition
from .particles import SOLVERS, ParticleSystem, isotonic_fit, solve, verify_solution

DISTRIBUTIONS = ("uniform", "gaussian", "presorted", "adversarial", "clustered")


def gen_adversarial_staircase(d: int, eps: float) -> np.ndarray:
    """Worst-case destinations for the round-based solver: a descending
    ramp from 1 to 0 followed by a shallow epsilon staircase, which forces
    the trailing particles to merge one per round."""
    if d < 3:
        raise ValueError("need d >= 3")
    if not (0.0 < eps < 1.0 / d):
        raise ValueError("eps must lie in (0, 1/d)")
    n_left = -(-d // 2)  # ceil(d/2)
    n_right = d // 2
    left = 1.0 - 2.0 * np.arange(n_left) / (d - 1)
    right = eps * np.arange(1, n_right + 1)
    return np.concatenate((left, right))


def _bench_input(dist: str, d: int, rng: np.random.Generator) -> np.ndarray:
    if dist == "uniform":
        return rng.uniform(0.0, 1.0, d)
    if dist == "gaussian":
        return rng.standard_normal(d)
    if dist == "presorted":
        return np.sort(rng.uniform(0.0, 1.0, d))
    if dist == "adversarial":
        return gen_adversarial_staircase(d, 0.5 / d)
    if dist == "clustered":
        levels = np.sort(rng.uniform(0.0, 1.0, 8))
        return levels[rng.integers(0, 8, d)]
    raise ValueError(f"unknown distribution {dist!r}")


BENCH_COLUMNS = (
    "d", "distribution", "algo", "threads", "repeat",
    "wall_time", "rounds", "clusters", "recursion_depth", "max_probes",
)


def run_benchmark(sizes, distributions, algos, thread_counts, repeats: int, seed: int):
    """Solver benchmark rows; deterministic data for a fixed seed."""
    for algo in algos:
        if algo not in SOLVERS:
            raise ValueError(f"unknown algo {algo!r}")
    for dist in distributions:
        if dist not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {dist!r}")
    rows = []
    for d in sizes:
        for dist in distributions:
            for rep in range(repeats):
                rng = np.random.default_rng((seed, d, DISTRIBUTIONS.index(dist), rep))
                y = _bench_input(dist, d, rng)
                ps = ParticleSystem(y, np.zeros(d), np.ones(d, dtype=np.int64))
                for algo in algos:
                    for threads in thread_counts:
                        _, stats = solve(ps.copy(), algo=algo, threads=threads)
                        rows.append({
                            "d": d, "distribution": dist, "algo": algo,
                            "threads": threads, "repeat": rep,
                            "wall_time": stats.wall_time,
                            "rounds": stats.merge_rounds,
                            "clusters": stats.clusters,
                            "recursion_depth": stats.recursion_depth,
                            "max_probes": stats.probes_per_merge_max,
                        })
    return rows


class SelftestReport:
    def __init__(self):
        self.lines = []
        self.failures = 0

    def check(self, name: str, ok: bool, detail: str = ""):
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail and not ok else ""
        self.lines.append(f"{status} {name}{suffix}")
        if not ok:
            self.failures += 1

    @property
    def ok(self) -> bool:
        return self.failures == 0


def run_selftest(solvers=SOLVERS, n_random: int = 200, seed: int = 0) -> SelftestReport:
    """Desk-scale oracle-equivalence and invariant suites.

    The solver list is injectable so a deliberately corrupted solver can be
    exercised; failures are reported, never raised.
    """
    rep = SelftestReport()
    counter = np.array([0.7, 1.0, 0.9, 0.99])
    expected = np.array([0.7, 0.95, 0.95, 0.99])
    for algo in solvers:
        try:
            fit = isotonic_fit(counter, algo=algo)
            ok = bool(np.allclose(fit, expected, rtol=0, atol=1e-12))
            cert = verify_solution(counter, None, fit)
            rep.check(f"counterexample fit [0.7,0.95,0.95,0.99] ({algo})", ok,
                      f"got {fit.tolist()}")
            rep.check(f"counterexample certificate ({algo})", bool(cert), cert.reason)
        except Exception as exc:  # report, don't raise
            rep.check(f"counterexample fit ({algo})", False, repr(exc))
    wrong = np.array([0.7, 2.89 / 3, 2.89 / 3, 2.89 / 3])
    cert = verify_solution(counter, None, wrong)
    rep.check("certificate rejects naive averaging fit", not cert.ok)

    rng = np.random.default_rng(seed)
    section_start = rep.failures
    for trial in range(n_random):
        d = int(rng.integers(1, 13))
        y = rng.choice([-1.0, 1.0]) * rng.uniform(0, 2) * rng.standard_normal(d)
        if d > 2 and trial % 3 == 0:
            y[rng.integers(0, d)] = y[rng.integers(0, d)]  # deliberate duplicates
        ref = oracle_isotonic_partition(y)
        for algo in solvers:
            try:
                fit = isotonic_fit(y, algo=algo)
            except Exception as exc:
                rep.check(f"random isotonic trial {trial} ({algo})", False, repr(exc))
                continue
            if not np.allclose(fit, ref, rtol=1e-9, atol=1e-12):
                rep.check(f"random isotonic trial {trial} ({algo})", False,
                          f"fit {fit.tolist()} != oracle {ref.tolist()}")
            else:
                cert = verify_solution(y, None, fit)
                if not cert.ok:
                    rep.check(f"random certificate trial {trial} ({algo})", False, cert.reason)
    rep.check("random isotonic trials match oracle and certificate",
              rep.failures == section_start)

    section_start = rep.failures
    for trial in range(20):
        d = int(rng.integers(2, 40))
        w = rng.standard_normal(d) * 3
        alpha = float(rng.uniform(0, 2))
        out = prox_R(w, alpha)
        cert = verify_prox_optimality(w, out, alpha)
        if not cert.ok:
            rep.check(f"prox optimality trial {trial}", False, cert.reason)
    rep.check("prox optimality certificates", rep.failures == section_start)

    section_start = rep.failures
    for trial in range(20):
        d = int(rng.integers(2, 500))
        w = rng.standard_normal(d)
        a = eval_R(w, mode="naive")
        b = eval_R(w, mode="fast")
        c = eval_R(w, mode="parallel")
        if not (np.isclose(a, b, rtol=1e-9) and np.isclose(a, c, rtol=1e-9)):
            rep.check(f"eval agreement trial {trial}", False, f"{a} {b} {c}")
    rep.check("eval modes agree", rep.failures == section_start)
    return rep


def _stats_json(stats) -> dict:
    # Deterministic fields only: identical inputs must produce identical
    # output bytes, so timing is reported by `bench`, not here.
    return {
        "rounds": stats.rounds,
        "merge_rounds": stats.merge_rounds,
        "clusters": stats.clusters,
        "recursion_depth": stats.recursion_depth,
        "probes_per_merge_max": stats.probes_per_merge_max,
        "total_work_ops": stats.total_work_ops,
    }


def _clusters_json(sol) -> list:
    return [
        {"start": int(s), "size": int(n), "value": float(val), "zeroed": bool(z)}
        for s, n, val, z in zip(sol.block_start, sol.block_mass, sol.block_value, sol.block_zeroed)
    ]


def _emit(payload, path):
    text = json.dumps(payload, indent=2)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> _Parser:
    parser = _Parser(prog="wsprox", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_io(p, batch=True):
        p.add_argument("--input", required=True)
        p.add_argument("--output", default="-")
        if batch:
            p.add_argument("--batch", action="store_true",
                           help="treat the input as multiple binary records")

    p = sub.add_parser("prox", help="composite prox of alpha*R + beta*l1 with rewinding")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--algo", default="pava", choices=SOLVERS)
    p.add_argument("--threads", type=int, default=None)
    add_io(p)

    p = sub.add_parser("isotonic", help="weighted isotonic regression")
    p.add_argument("--algo", default="pava", choices=SOLVERS)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--weights", default=None, help="optional positive integer masses file")
    add_io(p)

    p = sub.add_parser("eval", help="evaluate the weight-sharing penalty")
    p.add_argument("--mode", default="fast", choices=("naive", "fast", "parallel"))
    p.add_argument("--threads", type=int, default=None)
    add_io(p)

    p = sub.add_parser("metrics", help="sparsity and weight-sharing metrics")
    p.add_argument("--zero-tol", type=float, default=0.0)
    add_io(p)

    p = sub.add_parser("bench", help="solver benchmark (CSV)")
    p.add_argument("--sizes", default="1024,4096")
    p.add_argument("--distributions", default="uniform")
    p.add_argument("--algos", default="pava,imminent,end,search")
    p.add_argument("--threads", default="1")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-")

    p = sub.add_parser("demo", help="synthetic demos")
    demo_sub = p.add_subparsers(dest="demo_command", required=True, parser_class=_Parser)
    pd = demo_sub.add_parser("clustered-lasso")
    pd.add_argument("--d", type=int, default=50)
    pd.add_argument("--k", type=int, default=5)
    pd.add_argument("--n", type=int, default=200)
    pd.add_argument("--noise-sigma", type=float, default=0.0)
    pd.add_argument("--zero-fraction", type=float, default=0.0)
    pd.add_argument("--seed", type=int, default=0)
    pd.add_argument("--steps", type=int, default=1500)
    pd.add_argument("--alpha-sweep", default="0.1,0.5,1.0,2.0,5.0")
    pd.add_argument("--beta", type=float, default=0.0)
    pd.add_argument("--rho", type=float, default=0.9)
    pd.add_argument("--output", default="-")

    sub.add_parser("selftest", help="run desk-scale oracle and invariant suites")

    p = sub.add_parser("gen", help="input generators")
    gen_sub = p.add_subparsers(dest="gen_command", required=True, parser_class=_Parser)
    pg = gen_sub.add_parser("adversarial")
    pg.add_argument("--d", type=int, required=True)
    pg.add_argument("--eps", type=float, required=True)
    pg.add_argument("--output", required=True)
    pg.add_argument("--format", default="text", choices=("text", "bin"))
    return parser


def _threads_of(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    return default_threads()


def _cmd_prox(args) -> int:
    params = ProxParams(alpha=args.alpha, beta=args.beta, rho=args.rho)
    threads = _threads_of(args)
    vectors = io.read_vectors(args.input)
    if not args.batch and len(vectors) != 1:
        raise ValueError("multiple records in input; pass --batch")
    results = []
    for w in vectors:
        out, sol, stats = prox_composite(w, params, algo=args.algo, threads=threads)
        results.append({
            "values": [float(x) for x in out],
            "clusters": _clusters_json(sol),
            "stats": _stats_json(stats),
        })
    _emit(results if args.batch else results[0], args.output)
    return 0


def _cmd_isotonic(args) -> int:
    threads = _threads_of(args)
    vectors = io.read_vectors(args.input)
    if not args.batch and len(vectors) != 1:
        raise ValueError("multiple records in input; pass --batch")
    masses = None
    if args.weights is not None:
        masses = io.read_vector(args.weights)
        if np.any(masses != np.rint(masses)) or np.any(masses <= 0):
            raise ValueError("weights must be positive integers")
        masses = np.rint(masses).astype(np.int64)
    results = []
    for y in vectors:
        fit = isotonic_fit(y, m=masses, algo=args.algo, threads=threads)
        results.append({"values": [float(x) for x in fit]})
    _emit(results if args.batch else results[0], args.output)
    return 0


def _cmd_eval(args) -> int:
    threads = _threads_of(args)
    vectors = io.read_vectors(args.input)
    if not args.batch and len(vectors) != 1:
        raise ValueError("multiple records in input; pass --batch")
    results = [{"R": eval_R(w, mode=args.mode, threads=threads)} for w in vectors]
    _emit(results if args.batch else results[0], args.output)
    return 0


def _cmd_metrics(args) -> int:
    vectors = io.read_vectors(args.input)
    if not args.batch and len(vectors) != 1:
        raise ValueError("multiple records in input; pass --batch")
    results = []
    for w in vectors:
        m = metrics(w, zero_tol=args.zero_tol)
        results.append({
            "sparsity": m.sparsity,
            "distinct_nonzero": m.distinct_nonzero,
            "nonzero_count": m.nonzero_count,
            "weight_sharing": m.weight_sharing,
            "distinct_ratio": m.distinct_ratio,
        })
    _emit(results if args.batch else results[0], args.output)
    return 0


def _csv_list(text, cast):
    return [cast(part) for part in text.split(",") if part]


def _cmd_bench(args) -> int:
    rows = run_benchmark(
        sizes=_csv_list(args.sizes, int),
        distributions=_csv_list(args.distributions, str),
        algos=_csv_list(args.algos, str),
        thread_counts=_csv_list(args.threads, int),
        repeats=args.repeats,
        seed=args.seed,
    )
    out = sys.stdout if args.output in (None, "-") else open(args.output, "w", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_demo(args) -> int:
    data = gen_clustered_regression(
        d=args.d, k=args.k, n=args.n, noise_sigma=args.noise_sigma,
        zero_fraction=args.zero_fraction, seed=args.seed,
    )
    from .optimizer import least_squares_oracles

    _, _, lipschitz = least_squares_oracles(data)
    eta = 1.0 / lipschitz
    sweep = []
    for alpha in _csv_list(args.alpha_sweep, float):
        cfg = TrainConfig(
            params=ProxParams(alpha=alpha, beta=args.beta, rho=args.rho, eta=eta),
            steps=args.steps, momentum=0.9, seed=args.seed,
        )
        report = demo_clustered_lasso(data, cfg, method="proximal")
        report.pop("weights")
        report["alpha"] = alpha
        sweep.append(report)
    base_cfg = TrainConfig(
        params=ProxParams(alpha=_csv_list(args.alpha_sweep, float)[0] or 0.01,
                          beta=args.beta, rho=args.rho, eta=eta),
        steps=args.steps, momentum=0.9, seed=args.seed,
    )
    sub = demo_clustered_lasso(data, base_cfg, method="subgradient")
    sub.pop("weights")
    _emit({"proximal_sweep": sweep, "subgradient_baseline": sub}, args.output)
    return 0


def _cmd_selftest(_args) -> int:
    report = run_selftest()
    for line in report.lines:
        print(line)
    print(f"{'OK' if report.ok else 'FAILED'}: {report.failures} failure(s)")
    return 0 if report.ok else 3


def _cmd_gen(args) -> int:
    y = gen_adversarial_staircase(args.d, args.eps)
    if args.format == "text":
        io.write_text_vector(args.output, y)
    else:
        io.write_binary_vectors(args.output, [y])
    return 0


_COMMANDS = {
    "prox": _cmd_prox,
    "isotonic": _cmd_isotonic,
    "eval": _cmd_eval,
    "metrics": _cmd_metrics,
    "bench": _cmd_bench,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "demo":
            return _cmd_demo(args)
        if args.command == "gen":
            return _cmd_gen(args)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"wsprox: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
