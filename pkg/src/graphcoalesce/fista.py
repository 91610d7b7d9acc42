"""Dual accelerated proximal solver for the clustering objective.

The target problem, for a kernel K and mixing weight alpha in [0, 1]:

    minimize   Tr(pi^T K pi - 2 K pi)
               + lam * (alpha * sum_e ||b_e||_2 + (1-alpha) * sum_e ||b_e||_1)
    over       pi doubly stochastic,

where b_e = K_ij (pi_i - pi_j) are the edge blocks of the weighted
pairwise-difference operator.  The outer loop is a proximal-gradient
(deblurring) iteration on the quadratic term; each proximal step is a
denoising subproblem solved by accelerated ascent on its dual, whose
variables live on the kernel's edge support.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .kernel import apply_difference, apply_difference_adjoint, lipschitz_constant
from .projections import (
    ProjectionConfig,
    project_doubly_stochastic,
    project_l2_ball_blocks,
    project_linf_cube_blocks,
)


@dataclass
class DualState:
    """Edge-indexed dual iterates with their momentum companions.

    p blocks stay in the unit l2 ball, q entries in [-1, 1]; r, s are the
    extrapolated points the gradient is evaluated at; t is the momentum
    scalar.
    """

    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    s: np.ndarray
    t: float = 1.0
    iter: int = 0

    @classmethod
    def zeros(cls, n, n_edges):
        shape = (n, n_edges)
        return cls(p=np.zeros(shape), q=np.zeros(shape),
                   r=np.zeros(shape), s=np.zeros(shape))


@dataclass
class SolverConfig:
    lam: float = 1.0
    alpha: float = 0.95
    inner_tol: float = 1e-8
    outer_tol: float = 1e-6
    inner_max_iter: int = 5000
    outer_max_iter: int = 500
    projection_cfg: ProjectionConfig = field(default_factory=ProjectionConfig)
    single_loop: bool = False
    recover_from_momentum: bool = False
    primal_check_every: int = 1
    restart_every: int = 10
    carry_dual_state: bool = False
    outer_accel: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.inner_tol <= 0 or self.outer_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class SolveResult:
    pi: np.ndarray
    primal_value: float
    dual_value: float
    duality_gap: float
    inner_iterations: int
    outer_iterations: int
    converged: bool
    solver: str = "fista"


def _check_square(pi, kernel):
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (kernel.n, kernel.n):
        raise DimensionMismatch(
            f"expected {(kernel.n, kernel.n)}, got {pi.shape}")
    return pi


def penalty_value(pi, kernel, alpha):
    """Mixed total-variation penalty of pi (without the lam factor)."""
    blocks = apply_difference(pi, kernel).blocks
    group = np.linalg.norm(blocks, axis=0).sum()
    elem = np.abs(blocks).sum()
    return alpha * group + (1.0 - alpha) * elem


def primal_objective(pi, kernel, lam, alpha):
    """Quadratic fit term plus the weighted mixed penalty."""
    pi = _check_square(pi, kernel)
    Kpi = kernel.matvec(pi)
    quad = float(np.sum(pi * Kpi) - 2.0 * np.trace(Kpi))
    return quad + lam * penalty_value(pi, kernel, alpha)


def _dual_combination(state_p, state_q, alpha, kernel):
    return apply_difference_adjoint(
        alpha * state_p + (1.0 - alpha) * state_q, kernel)


def dual_objective(state, kernel, lam, alpha, target, projection_cfg=None):
    """Concave dual of the denoising subproblem at the given target.

    Evaluates ||x - P(x)||_F^2 - ||x||_F^2 with
    x = target - lam * (alpha p + (1-alpha) q) delta^T and P the doubly
    stochastic projection.  The denoising primal
    ||pi - target||_F^2 + 2 lam * penalty dominates this value plus
    ||target||_F^2 (weak duality).
    """
    x = target - lam * _dual_combination(state.p, state.q, alpha, kernel)
    px = project_doubly_stochastic(x, projection_cfg)
    return float(np.sum((x - px) ** 2) - np.sum(x * x))


def denoising_primal(pi, target, kernel, lam, alpha):
    """||pi - target||_F^2 + 2 lam * penalty, the subproblem objective."""
    return float(np.sum((pi - target) ** 2)) + 2.0 * lam * penalty_value(
        pi, kernel, alpha)


def dual_gradient(state_p, state_q, kernel, lam, alpha, target,
                  projection_cfg=None):
    """Gradient of the dual with respect to (p, q), stacked as a pair."""
    x = target - lam * _dual_combination(state_p, state_q, alpha, kernel)
    px = project_doubly_stochastic(x, projection_cfg)
    g = apply_difference(px, kernel).blocks
    return 2.0 * lam * alpha * g, 2.0 * lam * (1.0 - alpha) * g


def denoise(target, lam, alpha, kernel, cfg=None, state=None,
            full_output=False):
    """Proximal (denoising) step: minimize ||pi-target||^2/2 + lam*penalty
    over doubly stochastic pi, via accelerated ascent on the dual.

    Returns the feasible primal iterate recovered from the final dual
    state; lam = 0 reduces to the doubly stochastic projection of target.
    """
    if cfg is None:
        cfg = SolverConfig(lam=lam, alpha=alpha)
    pcfg = cfg.projection_cfg
    target = np.asarray(target, dtype=np.float64)
    L = lipschitz_constant(kernel, lam, alpha)
    if lam == 0.0 or L == 0.0 or kernel.n_edges == 0:
        pi = project_doubly_stochastic(target, pcfg)
        if full_output:
            return pi, {"iterations": 0, "converged": True,
                        "state": state or DualState.zeros(kernel.n,
                                                          kernel.n_edges)}
        return pi

    if state is None:
        state = DualState.zeros(kernel.n, kernel.n_edges)
    p, q, r, s, t = state.p, state.q, state.r, state.s, state.t
    step_p = 2.0 * lam * cfg.alpha / L
    step_q = 2.0 * lam * (1.0 - cfg.alpha) / L

    pi = project_doubly_stochastic(
        target - lam * _dual_combination(p, q, cfg.alpha, kernel), pcfg)
    converged = False
    check = max(1, cfg.primal_check_every)
    it = 0
    for it in range(1, cfg.inner_max_iter + 1):
        x = target - lam * _dual_combination(r, s, cfg.alpha, kernel)
        grad_base = apply_difference(project_doubly_stochastic(x, pcfg),
                                     kernel).blocks
        p_new = project_l2_ball_blocks(r + step_p * grad_base)
        q_new = project_linf_cube_blocks(s + step_q * grad_base)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        beta = (t - 1.0) / t_new
        r = p_new + beta * (p_new - p)
        s = q_new + beta * (q_new - q)
        p, q, t = p_new, q_new, t_new

        if it % check and it != cfg.inner_max_iter:
            continue
        if cfg.recover_from_momentum:
            src_p, src_q = r, s
        else:
            src_p, src_q = p, q
        pi_new = project_doubly_stochastic(
            target - lam * _dual_combination(src_p, src_q, cfg.alpha, kernel),
            pcfg)
        delta = np.linalg.norm(pi_new - pi) / max(1.0, np.linalg.norm(pi_new))
        pi = pi_new
        if delta <= cfg.inner_tol * check:
            converged = True
            break

    final = DualState(p=p, q=q, r=r, s=s, t=t, iter=state.iter + it)
    if full_output:
        return pi, {"iterations": it, "converged": converged, "state": final}
    return pi


def outer_step_constant(kernel):
    """Lipschitz constant of the quadratic term's gradient, 2*sigma_max(K)."""
    return 2.0 * kernel.spectral_norm()


def solve(kernel, cfg, warm_start=None):
    """Full solve at a single lam by the outer deblurring loop.

    Each outer iteration takes a gradient step on the quadratic term and
    denoises the result; the proximal weight is lam / L_outer so that the
    fixed point minimizes the stated primal objective.  The single_loop
    flag interleaves one dual ascent step per outer update instead of
    solving each denoising subproblem to tolerance.
    """
    n = kernel.n
    lam, alpha = cfg.lam, cfg.alpha
    pi = np.eye(n) if warm_start is None else np.array(warm_start, dtype=float)
    L_out = outer_step_constant(kernel)
    if L_out == 0.0:
        pi = project_doubly_stochastic(pi, cfg.projection_cfg)
        return SolveResult(pi=pi, primal_value=primal_objective(
            pi, kernel, lam, alpha), dual_value=0.0, duality_gap=0.0,
            inner_iterations=0, outer_iterations=0, converged=True)
    lam_eff = lam / L_out

    inner_total = 0
    converged = False
    state = None
    target = pi
    if cfg.single_loop:
        state = DualState.zeros(n, kernel.n_edges)
        inner_cfg = SolverConfig(
            lam=lam, alpha=alpha, inner_tol=cfg.inner_tol,
            outer_tol=cfg.outer_tol, inner_max_iter=1,
            outer_max_iter=cfg.outer_max_iter,
            projection_cfg=cfg.projection_cfg)
        it = 0
        for it in range(1, cfg.outer_max_iter + 1):
            target = pi - (2.0 / L_out) * (kernel.matvec(pi) - kernel.dense())
            if cfg.restart_every and it % cfg.restart_every == 0:
                # periodic momentum restart: with a moving target the
                # unrestarted extrapolation can settle on a biased point
                state = DualState(p=state.p, q=state.q, r=state.p.copy(),
                                  s=state.q.copy(), t=1.0, iter=state.iter)
            pi_new, info = denoise(target, lam_eff, alpha, kernel,
                                   inner_cfg, state=state, full_output=True)
            state = info["state"]
            inner_total += info["iterations"]
            if np.linalg.norm(pi_new - pi) <= cfg.outer_tol:
                pi = pi_new
                converged = True
                break
            pi = pi_new
        outer_iters = it
    else:
        K_dense = kernel.dense()
        it = 0
        y = pi
        t = 1.0
        for it in range(1, cfg.outer_max_iter + 1):
            target = y - (2.0 / L_out) * (kernel.matvec(y) - K_dense)
            start = state if cfg.carry_dual_state else None
            if start is not None:
                # restart momentum: the extrapolation points were built
                # for the previous target
                start = DualState(p=start.p, q=start.q, r=start.p.copy(),
                                  s=start.q.copy())
            pi_new, info = denoise(target, lam_eff, alpha, kernel, cfg,
                                   state=start, full_output=True)
            state = info["state"]
            inner_total += info["iterations"]
            step = np.linalg.norm(pi_new - pi)
            if cfg.outer_accel:
                t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
                y = pi_new + ((t - 1.0) / t_new) * (pi_new - pi)
                t = t_new
            else:
                y = pi_new
            if step <= cfg.outer_tol:
                pi = pi_new
                converged = True
                break
            pi = pi_new
        outer_iters = it

    dual_val = float("nan")
    gap = float("nan")
    if state is not None:
        h = dual_objective(state, kernel, lam_eff, alpha, target,
                           cfg.projection_cfg)
        dual_val = h + float(np.sum(np.asarray(target) ** 2))
        gap = denoising_primal(pi, target, kernel, lam_eff, alpha) - dual_val
    return SolveResult(
        pi=pi,
        primal_value=primal_objective(pi, kernel, lam, alpha),
        dual_value=dual_val,
        duality_gap=gap,
        inner_iterations=inner_total,
        outer_iterations=outer_iters,
        converged=converged,
    )
