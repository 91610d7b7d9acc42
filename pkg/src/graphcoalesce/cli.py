"""Command-line interface.

Subcommands
-----------
kernel   build the regularized two-hop kernel from an edge list
solve    solve at a single penalty weight and write pi + diagnostics
path     compute a regularization path into an output directory
bench    run the synthetic fractal-graph benchmark
verify   run the invariant battery (dual norms, operator identities,
         Lipschitz sampling, projection idempotence)
metrics  score a solved pi against ground-truth labels

Exit codes: 0 success, 1 property or convergence failure, 2 I/O or
validation error.  The environment variable GRAPHCOALESCE_LOG sets the
log level (DEBUG, INFO, WARNING, ...).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys

import numpy as np

from . import admm as admm_mod
from . import fista
from . import linearized as lin_mod
from .bench import BenchmarkConfig, FractalGraphSpec, run_benchmark, \
    write_benchmark_csv
from .errors import GraphCoalesceError
from .kernel import (
    apply_difference_adjoint,
    from_dense,
    lipschitz_constant,
    read_dense_csv,
    read_edge_list,
    two_hop_kernel,
    write_dense_csv,
)
from .metrics import (
    centroid_similarity,
    cluster_scores,
    default_fusion_epsilon,
    effective_rank,
    extract_clusters_by_fusion,
    kmeans,
)
from .paths import compute_path, default_lambda_grid, write_path
from .projections import ProjectionConfig, project_doubly_stochastic

log = logging.getLogger("graphcoalesce")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def stream_seed(seed, name):
    """Derive an independent, versioned PRNG stream from the global seed.

    Adding a new named consumer never perturbs the draws of existing
    ones.
    """
    digest = hashlib.sha256(f"graphcoalesce/1/{name}/{seed}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _add_shared(parser):
    parser.add_argument("--alpha", type=float, default=0.95,
                        help="group/elementwise penalty mix in [0, 1]")
    parser.add_argument("--gamma", type=float, default=None,
                        help="diagonal regularization; default "
                             "1e-6 * trace(K) / N")
    parser.add_argument("--solver", choices=("fista", "admm", "linearized"),
                        default="fista")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--format", choices=("csv", "json"), default="json",
                        help="format for printed/streamed results")


def build_parser():
    top = argparse.ArgumentParser(
        prog="graphcoalesce",
        description="Convex hierarchical clustering on similarity graphs.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="build a two-hop kernel from edges")
    p.add_argument("--edges", required=True, help="edge list (u<TAB>v<TAB>w)")
    p.add_argument("--output", required=True, help="dense kernel CSV to write")
    _add_shared(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("solve", help="solve at a single penalty weight")
    _add_input_group(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--rho", type=float, default=1.0, help="ADMM penalty")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--output", required=True, help="pi CSV to write")
    p.add_argument("--diagnostics", default=None,
                   help="JSON diagnostics file (default: stdout)")
    _add_shared(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("path", help="compute a regularization path")
    _add_input_group(p)
    p.add_argument("--lambdas", default=None,
                   help="comma-separated ascending penalty weights")
    p.add_argument("--lam-min", type=float, default=1e-3)
    p.add_argument("--lam-max", type=float, default=40.0)
    p.add_argument("--lam-count", type=int, default=40)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--outdir", required=True)
    _add_shared(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("bench", help="synthetic fractal-graph benchmark")
    p.add_argument("--n-meta", type=int, default=4)
    p.add_argument("--n-super", type=int, default=7)
    p.add_argument("--n-leaf", type=int, default=7)
    p.add_argument("--p-meta", type=float, default=0.5)
    p.add_argument("--p-cross-super", type=float,
                   default=FractalGraphSpec.p_cross_super)
    p.add_argument("--p-cross-meta", type=float,
                   default=FractalGraphSpec.p_cross_meta)
    p.add_argument("--seeds", type=int, default=5,
                   help="number of generator seeds to average over")
    p.add_argument("--lambdas", default="0.001,0.1,40",
                   help="comma-separated ascending penalty weights")
    p.add_argument("--output", required=True, help="results CSV")
    _add_shared(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the invariant battery")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--kernel", help="dense kernel CSV (N <= 64)")
    grp.add_argument("--random", type=int, metavar="N",
                     help="verify on a random PD kernel of this size")
    _add_shared(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("metrics", help="score a solved pi matrix")
    p.add_argument("--pi", required=True, help="pi CSV")
    p.add_argument("--kernel", default=None,
                   help="dense kernel CSV, enables effective rank")
    p.add_argument("--labels", default=None,
                   help="ground-truth labels, one integer per line")
    p.add_argument("--k", type=int, default=None,
                   help="k-means cluster count (default: #classes)")
    p.add_argument("--epsilon", type=float, default=None,
                   help="fusion threshold when no labels are given")
    p.add_argument("--restarts", type=int, default=10)
    _add_shared(p)
    p.set_defaults(func=cmd_metrics)
    return top


def _add_input_group(parser):
    grp = parser.add_mutually_exclusive_group(required=True)
    grp.add_argument("--kernel", help="dense kernel CSV")
    grp.add_argument("--edges",
                     help="adjacency edge list; a two-hop kernel is built")


def _default_gamma(kernel):
    return 1e-6 * float(np.sum(kernel.diagonal)) / kernel.n


def _load_kernel(args):
    """Resolve the mutually exclusive input modes into a kernel."""
    if getattr(args, "kernel", None):
        kernel = read_dense_csv(args.kernel)
        if args.gamma:
            kernel = from_dense(kernel.dense() + args.gamma * np.eye(kernel.n),
                                psd_margin=args.gamma)
        return kernel
    adjacency = read_edge_list(args.edges)
    base = two_hop_kernel(adjacency, gamma=0.0)
    gamma = args.gamma if args.gamma is not None else _default_gamma(base)
    log.info("two-hop kernel: n=%d gamma=%g", base.n, gamma)
    return two_hop_kernel(adjacency, gamma=gamma)


def _parse_lambdas(args):
    if getattr(args, "lambdas", None):
        lams = np.array([float(x) for x in args.lambdas.split(",")])
    else:
        lams = default_lambda_grid(args.lam_count, args.lam_min, args.lam_max)
    if lams.size == 0:
        raise ValueError("empty lambda grid")
    return lams


def _emit(record, args, stream=None):
    stream = stream or sys.stdout
    if args.format == "json":
        json.dump(record, stream, indent=2, sort_keys=True)
        stream.write("\n")
    else:
        for key in sorted(record):
            stream.write(f"{key},{record[key]}\n")


def cmd_kernel(args):
    adjacency = read_edge_list(args.edges)
    base = two_hop_kernel(adjacency, gamma=0.0)
    gamma = args.gamma if args.gamma is not None else _default_gamma(base)
    kernel = two_hop_kernel(adjacency, gamma=gamma)
    write_dense_csv(kernel.dense(), args.output)
    _emit({"n": kernel.n, "n_edges": kernel.n_edges, "gamma": gamma,
           "fingerprint": kernel.fingerprint(), "output": args.output}, args)
    return EXIT_OK


def cmd_solve(args):
    kernel = _load_kernel(args)
    if args.lam < 0:
        raise ValueError("lam must be nonnegative")
    if args.solver == "fista":
        opts = {}
        if args.tol is not None:
            opts["inner_tol"] = opts["outer_tol"] = args.tol
        if args.max_iter is not None:
            opts["outer_max_iter"] = args.max_iter
        cfg = fista.SolverConfig(lam=args.lam, alpha=args.alpha, **opts)
        res = fista.solve(kernel, cfg)
    elif args.solver == "admm":
        opts = {"rho": args.rho}
        if args.tol is not None:
            opts["tol"] = args.tol
        if args.max_iter is not None:
            opts["max_iter"] = args.max_iter
        res = admm_mod.admm_solve(kernel, args.lam, args.alpha,
                                  admm_mod.AdmmConfig(**opts))
    else:
        opts = {}
        if args.tol is not None:
            opts["outer_tol"] = args.tol
        if args.max_iter is not None:
            opts["outer_max_iter"] = args.max_iter
        res = lin_mod.linearized_solve(kernel, args.lam,
                                       lin_mod.LinearizedConfig(**opts))
    write_dense_csv(res.pi, args.output)
    diag = {
        "solver": args.solver,
        "lambda": args.lam,
        "alpha": args.alpha,
        "primal_value": res.primal_value,
        "duality_gap": res.duality_gap,
        "inner_iterations": res.inner_iterations,
        "outer_iterations": res.outer_iterations,
        "converged": bool(res.converged),
        "pi_file": args.output,
    }
    if args.diagnostics:
        with open(args.diagnostics, "w", encoding="utf-8") as fh:
            json.dump(diag, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        _emit(diag, args)
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_path(args):
    kernel = _load_kernel(args)
    lams = _parse_lambdas(args)
    path = compute_path(kernel, lams, solver=args.solver, alpha=args.alpha,
                        rho=args.rho)
    manifest = write_path(path, args.outdir)
    n_failed = sum(e.failed for e in path.entries)
    _emit({"manifest": manifest, "entries": len(path.entries),
           "failed": n_failed}, args)
    return EXIT_OK if n_failed == 0 else EXIT_FAIL


def cmd_bench(args):
    spec = FractalGraphSpec(
        n_meta=args.n_meta, n_super=args.n_super, n_leaf=args.n_leaf,
        p_meta=args.p_meta, p_cross_super=args.p_cross_super,
        p_cross_meta=args.p_cross_meta,
        seed=stream_seed(args.seed, "bench-graphs") % (2 ** 31))
    cfg = BenchmarkConfig(alpha=args.alpha, seeds=args.seeds,
                          threads=max(1, args.threads))
    if args.gamma is not None:
        cfg.gamma = args.gamma
    lams = _parse_lambdas(args)
    table = run_benchmark(spec, lams, cfg)
    write_benchmark_csv(table, args.output)
    _emit({"output": args.output, "rows": len(table),
           "seeds": args.seeds}, args)
    return EXIT_OK


def _check(name, ok, detail, report):
    report.append({"property": name, "passed": bool(ok), "detail": detail})
    log.info("%-28s %s (%s)", name, "PASS" if ok else "FAIL", detail)


def cmd_verify(args):
    if args.kernel:
        kernel = read_dense_csv(args.kernel)
        if kernel.n > 64:
            raise ValueError("verify requires N <= 64 for dense checks")
    else:
        n = args.random
        if not 2 <= n <= 64:
            raise ValueError("--random N must lie in [2, 64]")
        rng = np.random.default_rng(stream_seed(args.seed, "verify-kernel"))
        B = rng.random((n, n))
        kernel = from_dense(B @ B.T / n + 0.1 * np.eye(n))
    rng = np.random.default_rng(stream_seed(args.seed, "verify-draws"))
    n = kernel.n
    report = []

    # Dual-norm identities: the l2 ball is dual to the l2 norm, the
    # l-infinity cube to the l1 norm; closed-form maximizers attain them.
    worst2 = worst1 = 0.0
    attain2 = attain1 = True
    for _ in range(100):
        x = rng.standard_normal(n)
        samples = rng.standard_normal((200, n))
        samples /= np.maximum(1.0, np.linalg.norm(samples, axis=1))[:, None]
        worst2 = max(worst2, float((samples @ x).max() - np.linalg.norm(x)))
        cube = np.clip(rng.standard_normal((200, n)) * 2, -1, 1)
        worst1 = max(worst1, float((cube @ x).max() - np.abs(x).sum()))
        nx = np.linalg.norm(x)
        if nx > 0 and abs((x / nx) @ x - nx) > 1e-9:
            attain2 = False
        if abs(np.sign(x) @ x - np.abs(x).sum()) > 1e-9:
            attain1 = False
    _check("dual-norm-l2", worst2 <= 1e-9 and attain2,
           f"max excess {worst2:.2e}", report)
    _check("dual-norm-l1", worst1 <= 1e-9 and attain1,
           f"max excess {worst1:.2e}", report)

    # Pairwise-difference Gram identity over all ordered pairs.
    ok = True
    worst = 0.0
    for m in range(1, 9):
        G = admm_mod.delta_dense(m) @ admm_mod.delta_dense(m).T
        err = float(np.abs(G - admm_mod.delta_gram(m)).max())
        worst = max(worst, err)
        ok = ok and err == 0.0
    _check("difference-gram", ok, f"max abs err {worst:.2e}", report)

    # Lipschitz sampling of the denoising dual gradient.
    lam, alpha = 0.7, 0.6
    L = lipschitz_constant(kernel, lam, alpha)
    target = project_doubly_stochastic(rng.random((n, n)))
    pcfg = ProjectionConfig(method="dual", tol=1e-10)
    worst_ratio = 0.0
    m = kernel.n_edges
    for _ in range(1000 if m else 0):
        p1, q1, p2, q2 = (rng.standard_normal((n, m)) * 0.3 for _ in range(4))
        g1 = fista.dual_gradient(p1, q1, kernel, lam, alpha, target, pcfg)
        g2 = fista.dual_gradient(p2, q2, kernel, lam, alpha, target, pcfg)
        num = np.sqrt(np.sum((g1[0] - g2[0]) ** 2)
                      + np.sum((g1[1] - g2[1]) ** 2))
        den = np.sqrt(np.sum((p1 - p2) ** 2) + np.sum((q1 - q2) ** 2))
        if den > 0:
            worst_ratio = max(worst_ratio, num / den)
    _check("lipschitz-sampling", worst_ratio <= L * (1 + 1e-9),
           f"max ratio {worst_ratio:.4g} vs L {L:.4g}", report)

    # Projection idempotence and non-expansiveness.
    worst_idem = worst_exp = 0.0
    for _ in range(50):
        Y = rng.standard_normal((n, n))
        Z = rng.standard_normal((n, n))
        PY = project_doubly_stochastic(Y)
        PZ = project_doubly_stochastic(Z)
        worst_idem = max(worst_idem, float(np.linalg.norm(
            project_doubly_stochastic(PY) - PY)))
        expansion = np.linalg.norm(PY - PZ) - np.linalg.norm(Y - Z)
        worst_exp = max(worst_exp, float(expansion))
    _check("projection-idempotent", worst_idem <= 1e-6,
           f"max drift {worst_idem:.2e}", report)
    _check("projection-nonexpansive", worst_exp <= 1e-8,
           f"max expansion {worst_exp:.2e}", report)

    # Adjoint identity <apply_difference(M), B> = <M, adjoint(B)>.
    worst_adj = 0.0
    for _ in range(20):
        M = rng.standard_normal((n, n))
        B = rng.standard_normal((n, kernel.n_edges))
        from .kernel import apply_difference
        lhs = float(np.sum(apply_difference(M, kernel).blocks * B))
        rhs = float(np.sum(M * apply_difference_adjoint(B, kernel)))
        worst_adj = max(worst_adj, abs(lhs - rhs) / max(1.0, abs(lhs)))
    _check("difference-adjoint", worst_adj <= 1e-10,
           f"max rel err {worst_adj:.2e}", report)

    failed = [r for r in report if not r["passed"]]
    for r in report:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"{status}  {r['property']}: {r['detail']}")
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_metrics(args):
    pi = np.loadtxt(args.pi, delimiter=",", ndmin=2)
    out = {"n": int(pi.shape[0])}
    if args.kernel:
        kernel = read_dense_csv(args.kernel)
        out["effective_rank"] = effective_rank(
            centroid_similarity(pi, kernel))
    if args.labels:
        truth = np.loadtxt(args.labels, dtype=np.int64, ndmin=1)
        if truth.size != pi.shape[0]:
            raise ValueError("label count does not match pi")
        k = args.k if args.k is not None else int(np.unique(truth).size)
        asg = kmeans(pi, k, seed=stream_seed(args.seed, "metrics-kmeans"),
                     restarts=args.restarts)
        out.update(cluster_scores(asg, truth, points=pi))
        out["k"] = k
    else:
        eps = args.epsilon if args.epsilon is not None \
            else default_fusion_epsilon(pi.shape[1])
        asg = extract_clusters_by_fusion(pi, eps)
        out["fusion_clusters"] = int(asg.k)
        out["fusion_epsilon"] = float(eps)
    _emit(out, args)
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(
        level=os.environ.get("GRAPHCOALESCE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, GraphCoalesceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
