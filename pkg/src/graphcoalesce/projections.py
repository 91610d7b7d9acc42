"""Projection operators used throughout the solvers.

The workhorse is the Euclidean projection onto the doubly stochastic set:
an alternation between the exact projection onto the affine set
{P1 = 1, 1^T P = 1^T} and the nonnegative clamp.  Plain alternation
converges to a feasible point that is generally *not* the nearest one, so
a Dykstra correction on the clamp step is applied by default; with it the
iteration converges to the true Euclidean projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ProjectionConfig:
    """Stopping rule and method for the doubly stochastic projection.

    method "fixed-point" runs the affine/clamp alternation (with Dykstra
    correction); "dual" maximizes the 2N-dimensional dual of the
    projection QP with L-BFGS, which is much faster for large N and is
    what the solvers use internally.
    """

    tol: float = 1e-9
    max_iter: int = 10_000
    dykstra: bool = True
    method: str = "fixed-point"

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.method not in ("fixed-point", "dual"):
            raise ValueError("method must be 'fixed-point' or 'dual'")


def _affine_step(P):
    # Exact projection onto {P1 = 1, 1^T P = 1^T}:
    # P + (1/n I + (1^T P 1)/n^2 I - 1/n P) 1 1^T - 1/n 1 1^T P
    n = P.shape[0]
    row = P.sum(axis=1)
    col = P.sum(axis=0)
    total = row.sum()
    return (P
            + (1.0 / n + total / n ** 2 - row / n)[:, None]
            - col[None, :] / n)


def _project_dual(Y, tol, max_iter):
    # Maximize the dual of the projection QP over the row/column equality
    # multipliers; the clamp handles nonnegativity in closed form.
    from scipy.optimize import minimize

    n = Y.shape[0]

    def neg_dual(x):
        mu, nu = x[:n], x[n:]
        P = np.maximum(Y + mu[:, None] + nu[None, :], 0.0)
        r = P.sum(axis=1) - 1.0
        c = P.sum(axis=0) - 1.0
        val = 0.5 * np.sum((P - Y) ** 2) - mu @ r - nu @ c
        return -val, np.concatenate([r, c])

    res = minimize(neg_dual, np.zeros(2 * n), jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iter, "gtol": tol, "ftol": 0.0})
    mu, nu = res.x[:n], res.x[n:]
    P = np.maximum(Y + mu[:, None] + nu[None, :], 0.0)
    return P, {"iterations": int(res.nit), "converged": bool(res.success)}


def project_doubly_stochastic(y, cfg=None, full_output=False):
    """Euclidean projection onto the set of doubly stochastic matrices.

    Returns the final clamped iterate: entries are exactly nonnegative and
    row/column sums are within cfg.tol of 1.  With full_output, also
    returns a dict with iteration count and a convergence flag.
    """
    if cfg is None:
        cfg = ProjectionConfig()
    P = np.array(y, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("input must be a square matrix")
    if not np.all(np.isfinite(P)):
        raise ValueError("input must be finite")
    if cfg.method == "dual":
        P, info = _project_dual(P, min(cfg.tol, 1e-8), cfg.max_iter)
        if full_output:
            return P, info
        return P
    correction = np.zeros_like(P)
    converged = False
    it = 0
    prev = None
    for it in range(1, cfg.max_iter + 1):
        A = _affine_step(P)
        if cfg.dykstra:
            shifted = A + correction
            P = np.maximum(shifted, 0.0)
            correction = shifted - P
        else:
            P = np.maximum(A, 0.0)
        if prev is not None and np.linalg.norm(P - prev) <= cfg.tol:
            converged = True
            break
        prev = P
    if full_output:
        return P, {"iterations": it, "converged": converged}
    return P


def project_l2_ball_blocks(blocks):
    """Scale each column into the unit Euclidean ball."""
    blocks = np.asarray(blocks, dtype=np.float64)
    norms = np.linalg.norm(blocks, axis=0)
    scale = 1.0 / np.maximum(1.0, norms)
    return blocks * scale[None, :]


def project_linf_cube_blocks(blocks):
    """Clamp every entry to [-1, 1]."""
    return np.clip(np.asarray(blocks, dtype=np.float64), -1.0, 1.0)


def project_simplex_rows(y):
    """Project each row of y onto the probability simplex (sort-based)."""
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    n = y.shape[1]
    u = np.sort(y, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1) - 1.0
    idx = np.arange(1, n + 1)
    cond = u - css / idx > 0
    rho = n - np.argmax(cond[:, ::-1], axis=1) - 1
    theta = css[np.arange(y.shape[0]), rho] / (rho + 1)
    return np.maximum(y - theta[:, None], 0.0)


def project_row_stochastic(y, rows=True):
    """Project onto matrices whose rows (or columns) lie on the simplex."""
    y = np.asarray(y, dtype=np.float64)
    if rows:
        return project_simplex_rows(y)
    return project_simplex_rows(y.T).T


def project_frobenius_ball(x, radius):
    """Scale x into the Frobenius ball of the given radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    x = np.asarray(x, dtype=np.float64)
    nrm = np.linalg.norm(x)
    if nrm <= radius:
        return x.copy()
    return x * (radius / nrm)
