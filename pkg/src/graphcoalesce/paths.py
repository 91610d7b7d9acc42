"""Regularization-path driver and path manifest I/O.

A path is the ordered family pi(lam) for an increasing lam grid, computed
sequentially with warm starts (the previous pi seeds the next solve; dual
state is reset so the momentum does not fight the new target).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import admm as admm_mod
from . import fista
from . import linearized as lin_mod
from .errors import GraphCoalesceError, IndefiniteInput, ZeroMatrix
from .kernel import write_dense_csv
from .metrics import centroid_similarity, effective_rank


@dataclass
class PathEntry:
    lam: float
    pi: np.ndarray
    primal_value: float
    duality_gap: float
    effective_rank: float
    wall_time: float
    converged: bool
    failed: bool = False
    error: str = ""


@dataclass
class RegularizationPath:
    entries: list[PathEntry] = field(default_factory=list)
    kernel_fingerprint: str = ""
    solver_id: str = "fista"


def default_lambda_grid(n_points=40, lo=1e-3, hi=40.0):
    """Log-spaced penalty grid."""
    return np.geomspace(lo, hi, n_points)


def _solve_one(kernel, lam, solver, alpha, rho, solver_opts, warm):
    opts = dict(solver_opts or {})
    if solver == "fista":
        cfg = fista.SolverConfig(lam=lam, alpha=alpha, **opts)
        return fista.solve(kernel, cfg, warm_start=warm)
    if solver == "admm":
        cfg = admm_mod.AdmmConfig(rho=opts.pop("rho", rho), **opts)
        return admm_mod.admm_solve(kernel, lam, alpha, cfg, warm_start=warm)
    if solver == "linearized":
        cfg = lin_mod.LinearizedConfig(**opts)
        return lin_mod.linearized_solve(kernel, lam, cfg, warm_start=warm)
    raise ValueError(f"unknown solver {solver!r}")


def compute_path(kernel, lambdas, solver="fista", alpha=0.95, rho=1.0,
                 solver_opts=None, warm_start=True):
    """Sequential solves over an ascending lam grid.

    A failing entry is recorded with its error and the path continues
    from the last good iterate.
    """
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if np.any(lambdas < 0):
        raise ValueError("lambdas must be nonnegative")
    if np.any(np.diff(lambdas) <= 0) and lambdas.size > 1:
        raise ValueError("lambdas must be strictly increasing")
    path = RegularizationPath(kernel_fingerprint=kernel.fingerprint(),
                              solver_id=solver)
    warm = None
    for lam in lambdas:
        t0 = time.perf_counter()
        try:
            res = _solve_one(kernel, float(lam), solver, alpha, rho,
                             solver_opts, warm if warm_start else None)
            try:
                er = effective_rank(centroid_similarity(res.pi, kernel))
            except (IndefiniteInput, ZeroMatrix):
                er = float("nan")
            entry = PathEntry(
                lam=float(lam), pi=res.pi,
                primal_value=res.primal_value,
                duality_gap=res.duality_gap,
                effective_rank=er,
                wall_time=time.perf_counter() - t0,
                converged=res.converged,
            )
            warm = res.pi
        except GraphCoalesceError as exc:
            entry = PathEntry(
                lam=float(lam), pi=None, primal_value=float("nan"),
                duality_gap=float("nan"), effective_rank=float("nan"),
                wall_time=time.perf_counter() - t0, converged=False,
                failed=True, error=str(exc))
        path.entries.append(entry)
    return path


def write_path(path, outdir):
    """Write per-lam pi matrices as CSV plus a JSON manifest.

    The manifest is written last through an atomic rename so partial runs
    are detectable by its absence.
    """
    os.makedirs(outdir, exist_ok=True)
    records = []
    for idx, e in enumerate(path.entries):
        # wall_time is deliberately omitted so identical runs produce
        # byte-identical manifests
        rec = {
            "lambda": e.lam,
            "primal_value": e.primal_value,
            "duality_gap": e.duality_gap,
            "effective_rank": e.effective_rank,
            "converged": e.converged,
            "failed": e.failed,
        }
        if e.failed:
            rec["error"] = e.error
            rec["pi_file"] = None
        else:
            name = f"pi_{idx:04d}.csv"
            write_dense_csv(e.pi, os.path.join(outdir, name))
            rec["pi_file"] = name
        records.append(rec)
    manifest = {
        "solver": path.solver_id,
        "kernel_fingerprint": path.kernel_fingerprint,
        "entries": records,
    }
    tmp = os.path.join(outdir, ".manifest.json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, os.path.join(outdir, "manifest.json"))
    return os.path.join(outdir, "manifest.json")


def read_path(outdir):
    """Load a manifest and its pi matrices back into a path object."""
    with open(os.path.join(outdir, "manifest.json"), encoding="utf-8") as fh:
        manifest = json.load(fh)
    path = RegularizationPath(
        kernel_fingerprint=manifest["kernel_fingerprint"],
        solver_id=manifest["solver"])
    for rec in manifest["entries"]:
        pi = None
        if rec.get("pi_file"):
            pi = np.loadtxt(os.path.join(outdir, rec["pi_file"]),
                            delimiter=",", ndmin=2)
        path.entries.append(PathEntry(
            lam=rec["lambda"], pi=pi,
            primal_value=rec["primal_value"],
            duality_gap=rec["duality_gap"],
            effective_rank=rec["effective_rank"],
            wall_time=rec.get("wall_time", float("nan")),
            converged=rec["converged"],
            failed=rec.get("failed", False),
            error=rec.get("error", "")))
    return path
