"""Independent oracles used by the test suite.

Everything here is deliberately implemented from first principles (cvxpy
programs, dense brute-force descent, explicit operator construction) so
the package is checked against code that shares none of its internals.
"""

import numpy as np


def birkhoff_constraints(P):
    import cvxpy as cp

    n = P.shape[0]
    return [P >= 0, cp.sum(P, axis=0) == np.ones(n),
            cp.sum(P, axis=1) == np.ones(n)]


def cvxpy_project_doubly_stochastic(Y):
    """Exact Euclidean projection onto the Birkhoff polytope."""
    import cvxpy as cp

    n = Y.shape[0]
    P = cp.Variable((n, n))
    prob = cp.Problem(cp.Minimize(cp.sum_squares(P - Y)),
                      birkhoff_constraints(P))
    prob.solve(solver=cp.CLARABEL)
    return np.asarray(P.value)


def dykstra_project(Y, iters=4000, tol=1e-12):
    """Dykstra's alternating projections onto {affine sums} and {>= 0}.

    Independent implementation (different structure from the package's
    fixed-point scheme): two explicit half-steps, each with its own
    correction variable.
    """
    Y = np.asarray(Y, dtype=np.float64)
    n = Y.shape[0]
    x = Y.copy()
    inc_a = np.zeros_like(Y)
    inc_b = np.zeros_like(Y)
    prev = None
    for _ in range(iters):
        # affine set {P1 = 1, 1^T P = 1^T}
        y = x + inc_a
        row = y.sum(axis=1, keepdims=True)
        col = y.sum(axis=0, keepdims=True)
        total = y.sum()
        a = y + (1.0 - row) / n + (1.0 - col) / n - (n - total) / n ** 2
        inc_a = y - a
        # nonnegative orthant
        y = a + inc_b
        x = np.maximum(y, 0.0)
        inc_b = y - x
        if prev is not None and np.abs(x - prev).max() < tol:
            break
        prev = x.copy()
    return x


def _sqrt_factor(K):
    w, V = np.linalg.eigh(0.5 * (K + K.T))
    w = np.maximum(w, 0.0)
    return (V * np.sqrt(w)) @ V.T


def _penalty_expr(pi, K, alpha):
    import cvxpy as cp

    n = K.shape[0]
    terms_group = []
    terms_l1 = []
    for i in range(n):
        for j in range(i + 1, n):
            if K[i, j] != 0.0:
                block = K[i, j] * (pi[:, i] - pi[:, j])
                terms_group.append(cp.norm(block, 2))
                terms_l1.append(cp.norm(block, 1))
    group = cp.sum(cp.hstack(terms_group)) if terms_group else 0.0
    elem = cp.sum(cp.hstack(terms_l1)) if terms_l1 else 0.0
    return alpha * group + (1.0 - alpha) * elem


def cvxpy_solve_full(K, lam, alpha):
    """Exact minimizer of the full clustering objective over Delta_N.

    Uses the spectral square root Phi (K = Phi^T Phi) to express the
    quadratic as a sum of squares plus a linear term.
    """
    import cvxpy as cp

    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    Phi = _sqrt_factor(K)
    pi = cp.Variable((n, n))
    quad = cp.sum_squares(Phi @ pi) - 2.0 * cp.trace(K @ pi)
    prob = cp.Problem(cp.Minimize(quad + lam * _penalty_expr(pi, K, alpha)),
                      birkhoff_constraints(pi))
    prob.solve(solver=cp.CLARABEL)
    return np.asarray(pi.value), float(prob.value)


def cvxpy_denoise(B, K, lam_d, alpha):
    """Exact minimizer of ||pi - B||_F^2 + 2 lam_d * penalty over Delta_N."""
    import cvxpy as cp

    B = np.asarray(B, dtype=np.float64)
    n = B.shape[0]
    pi = cp.Variable((n, n))
    obj = cp.sum_squares(pi - B) + 2.0 * lam_d * _penalty_expr(pi, K, alpha)
    prob = cp.Problem(cp.Minimize(obj), birkhoff_constraints(pi))
    prob.solve(solver=cp.CLARABEL)
    return np.asarray(pi.value), float(prob.value)


def dense_delta(n):
    """Explicit difference operator over ALL ordered pairs (i, j).

    Columns indexed by (i, j), entry e_i - e_j; built loop-by-loop so the
    Gram identity check does not share code with the package.
    """
    cols = []
    for i in range(n):
        for j in range(n):
            c = np.zeros(n)
            c[i] += 1.0
            c[j] -= 1.0
            cols.append(c)
    return np.stack(cols, axis=1)


def full_objective(pi, K, lam, alpha):
    """Straightforward dense evaluation of the clustering objective."""
    pi = np.asarray(pi)
    K = np.asarray(K)
    n = K.shape[0]
    val = float(np.trace(pi.T @ K @ pi - 2.0 * K @ pi))
    for i in range(n):
        for j in range(i + 1, n):
            if K[i, j] != 0.0:
                b = K[i, j] * (pi[:, i] - pi[:, j])
                val += lam * (alpha * np.linalg.norm(b)
                              + (1 - alpha) * np.abs(b).sum())
    return val


def projected_subgradient(K, lam, alpha, iters=1_000_000, seed=0,
                          project=None):
    """Long-horizon projected subgradient descent on the full objective.

    Polyak-style diminishing steps; tracks the best feasible iterate.
    `project` must be an exact Euclidean projection onto Delta_N (the
    cvxpy one is used when fixtures are generated).
    """
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    if project is None:
        project = lambda Y: dykstra_project(Y, iters=400, tol=1e-11)  # noqa: E731
    rng = np.random.default_rng(seed)
    pi = project(np.eye(n) + 0.01 * rng.standard_normal((n, n)))
    best_pi, best_val = pi.copy(), full_objective(pi, K, lam, alpha)
    iu, ju = np.triu_indices(n, k=1)
    mask = K[iu, ju] != 0.0
    iu, ju, w = iu[mask], ju[mask], K[iu, ju][mask]
    for k in range(1, iters + 1):
        g = 2.0 * (K @ pi - K)
        b = (pi[:, iu] - pi[:, ju]) * w[None, :]
        norms = np.linalg.norm(b, axis=0)
        dir_group = np.where(norms[None, :] > 1e-12, b / np.maximum(norms, 1e-12), 0.0)
        sub = lam * (alpha * dir_group + (1 - alpha) * np.sign(b)) * w[None, :]
        np.add.at(g.T, iu, sub.T)
        np.add.at(g.T, ju, -sub.T)
        step = 0.05 / (np.sqrt(k) * max(1.0, np.linalg.norm(g)))
        pi = project(pi - step * g)
        if k % 250 == 0 or k == iters:
            val = full_objective(pi, K, lam, alpha)
            if val < best_val:
                best_val, best_pi = val, pi.copy()
    return best_pi, best_val


def dense_linearized_descent(K, lam, iters=20000, seed=0):
    """Long-horizon projected gradient on the squared-penalty surrogate
    over row-stochastic matrices; oracle for the linearized solver."""
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    Kt = K - np.diag(np.diag(K))
    deg = Kt @ np.ones(n)

    def obj(pi):
        G = pi.T @ K @ pi
        quad = float(np.trace(G - 2.0 * K @ pi))
        pen = 2.0 * (float(np.trace(G @ np.diag(deg)))
                     - float(np.sum(G * Kt)))
        return quad + lam * pen

    def grad(pi):
        Kpi = K @ pi
        return (2.0 * (Kpi - K)
                + lam * (4.0 * Kpi * deg[None, :] - 4.0 * Kpi @ Kt))

    def project_rows(Y):
        # sort-based simplex projection, reimplemented independently
        out = np.empty_like(Y)
        for r in range(Y.shape[0]):
            y = Y[r]
            u = np.sort(y)[::-1]
            css = np.cumsum(u) - 1.0
            rho = np.nonzero(u - css / np.arange(1, y.size + 1) > 0)[0][-1]
            theta = css[rho] / (rho + 1.0)
            out[r] = np.maximum(y - theta, 0.0)
        return out

    smax = float(np.linalg.eigvalsh(K).max())
    eta = 1.0 / (2.0 * smax * (1.0 + 2.0 * lam * max(1e-12, deg.max())))
    pi = np.eye(n)
    best, best_val = pi.copy(), obj(pi)
    for _ in range(iters):
        pi = project_rows(pi - eta * grad(pi))
        v = obj(pi)
        if v < best_val:
            best_val, best = v, pi.copy()
    return best, best_val
