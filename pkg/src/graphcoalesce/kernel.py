"""Similarity kernels and the edge-wise pairwise-difference operator.

A kernel is a sparse symmetric nonnegative matrix K over N nodes.  The
pairwise-difference operator maps an N x N matrix M to one R^N block per
kernel edge, block(i, j) = (M_i - M_j) * K_ij (columns of M).  Dual
variables of the solvers live in the same edge-indexed space, so memory
stays O(N * |E|).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    AsymmetricDuplicate,
    DimensionMismatch,
    IndexOutOfRange,
    IsolatedNode,
    NonFiniteWeight,
    NonSymmetricInput,
)


class SimilarityKernel:
    """Sparse symmetric nonnegative similarity matrix.

    Off-diagonal support is stored once per unordered pair (i < j) in a
    canonical sorted edge list; the diagonal is kept separately.
    Instances are immutable after construction and safe to share across
    threads.

    Attributes
    ----------
    n : int
        Node count.
    edges : (m, 2) int array
        Unordered pairs i < j with nonzero weight, lexicographically sorted.
    weights : (m,) float array
        Edge weights, strictly positive.
    diagonal : (n,) float array
        Diagonal entries of K.
    psd_margin : float or None
        Lower bound on the smallest eigenvalue recorded after
        regularization; None means unverified.
    """

    def __init__(self, n, edges, weights, diagonal=None, psd_margin=None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if edges.shape[0] != weights.shape[0]:
            raise DimensionMismatch("edge list and weight list lengths differ")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise IndexOutOfRange(f"edge endpoints must lie in [0, {n})")
        if np.any(edges[:, 0] >= edges[:, 1]):
            raise ValueError("edges must satisfy i < j")
        if not np.all(np.isfinite(weights)):
            raise NonFiniteWeight("non-finite edge weight")
        if np.any(weights < 0):
            raise ValueError("off-diagonal weights must be nonnegative")
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        weights = weights[order]
        keep = weights != 0.0
        self.n = int(n)
        self.edges = edges[keep]
        self.weights = weights[keep]
        if diagonal is None:
            diagonal = np.zeros(n)
        self.diagonal = np.asarray(diagonal, dtype=np.float64).copy()
        if not np.all(np.isfinite(self.diagonal)):
            raise NonFiniteWeight("non-finite diagonal entry")
        self.psd_margin = psd_margin
        self._freeze_arrays()
        # Weighted incidence: column e = (e_i - e_j) * w_e, so that
        # apply_difference(M) = M @ incidence and the adjoint is @ incidence.T.
        m = self.edges.shape[0]
        rows = self.edges.reshape(-1)
        cols = np.repeat(np.arange(m), 2)
        vals = np.stack([self.weights, -self.weights], axis=1).reshape(-1)
        self._incidence = sp.csc_matrix((vals, (rows, cols)), shape=(self.n, m))

    def _freeze_arrays(self):
        for a in (self.edges, self.weights, self.diagonal):
            a.setflags(write=False)

    @property
    def n_edges(self):
        return self.edges.shape[0]

    @property
    def incidence(self):
        """Weighted difference operator as a sparse (n, m) matrix."""
        return self._incidence

    def dense(self):
        """Materialize K as a dense (n, n) array."""
        K = np.zeros((self.n, self.n))
        i, j = self.edges[:, 0], self.edges[:, 1]
        K[i, j] = self.weights
        K[j, i] = self.weights
        K[np.diag_indices(self.n)] = self.diagonal
        return K

    def matvec(self, x):
        """K @ x for a vector or matrix x."""
        K = self._as_sparse()
        return K @ x

    def _as_sparse(self):
        if not hasattr(self, "_sparse"):
            i, j = self.edges[:, 0], self.edges[:, 1]
            rows = np.concatenate([i, j, np.arange(self.n)])
            cols = np.concatenate([j, i, np.arange(self.n)])
            vals = np.concatenate([self.weights, self.weights, self.diagonal])
            self._sparse = sp.csr_matrix((vals, (rows, cols)),
                                         shape=(self.n, self.n))
        return self._sparse

    def column_norms(self):
        """Euclidean norms of the columns of K, diagonal included."""
        K = self._as_sparse()
        return np.sqrt(np.asarray(K.multiply(K).sum(axis=0)).ravel())

    def spectral_norm(self, iters=50, tol=1e-10):
        """Largest singular value of K by power iteration."""
        if self.n == 1:
            return abs(float(self.diagonal[0]))
        rng = np.random.default_rng(0)
        v = rng.standard_normal(self.n)
        v /= np.linalg.norm(v)
        sigma = 0.0
        for _ in range(iters):
            w = self.matvec(v)
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0
            v_new = w / nw
            if abs(nw - sigma) <= tol * max(1.0, nw):
                return nw
            sigma, v = nw, v_new
        return sigma

    def frobenius_norm(self):
        return float(np.sqrt(2.0 * np.sum(self.weights ** 2)
                             + np.sum(self.diagonal ** 2)))

    def fingerprint(self):
        """Content hash of the kernel, for path manifests."""
        import hashlib

        h = hashlib.sha256()
        h.update(np.int64(self.n).tobytes())
        h.update(np.ascontiguousarray(self.edges).tobytes())
        h.update(np.ascontiguousarray(self.weights).tobytes())
        h.update(np.ascontiguousarray(self.diagonal).tobytes())
        return h.hexdigest()


@dataclass
class DifferenceImage:
    """Edge-indexed blocks (n, m): column e holds (M_i - M_j) * K_ij."""

    blocks: np.ndarray
    n: int
    n_edges: int


def from_edge_list(rows, n=None):
    """Build a SimilarityKernel from (u, v, w) triples.

    Self-loops go to the diagonal.  Duplicate pairs are rejected; a pair
    given in both orientations must carry the same weight.
    """
    if n is None:
        n = 1 + max((max(u, v) for u, v, _ in rows), default=-1)
    diag = np.zeros(n)
    seen = {}
    for u, v, w in rows:
        u, v = int(u), int(v)
        w = float(w)
        if not np.isfinite(w):
            raise NonFiniteWeight(f"weight for ({u}, {v}) is not finite")
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            diag[u] += w
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            raise AsymmetricDuplicate(
                f"pair {key} given twice (weights {seen[key]} and {w})")
        seen[key] = w
    edges = np.array(sorted(seen), dtype=np.int64).reshape(-1, 2)
    weights = np.array([seen[tuple(e)] for e in edges])
    return SimilarityKernel(n, edges, weights, diagonal=diag)


def from_dense(K, tol=0.0, psd_margin=None):
    """Build a kernel from a dense symmetric matrix."""
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DimensionMismatch("kernel matrix must be square")
    if not np.allclose(K, K.T, atol=max(tol, 1e-12), rtol=1e-10):
        raise NonSymmetricInput("kernel matrix is not symmetric")
    n = K.shape[0]
    Ksym = 0.5 * (K + K.T)
    iu, ju = np.triu_indices(n, k=1)
    mask = Ksym[iu, ju] != 0.0
    edges = np.stack([iu[mask], ju[mask]], axis=1)
    return SimilarityKernel(n, edges, Ksym[iu[mask], ju[mask]],
                            diagonal=np.diag(Ksym), psd_margin=psd_margin)


def two_hop_kernel(adjacency, gamma=0.0):
    """Degree-normalized two-hop kernel D^{-1/2} A^2 D^{-1/2} + gamma*I.

    D = Diag(A^2 1).  gamma > 0 shifts the spectrum and is recorded as
    the PSD margin (A^2 normalized this way is already PSD).
    """
    A = adjacency.dense()
    A2 = A @ A
    d = A2 @ np.ones(adjacency.n)
    if np.any(d <= 0):
        raise IsolatedNode("node with no 2-hop neighbor (zero row sum of A^2)")
    s = 1.0 / np.sqrt(d)
    K = (A2 * s[None, :]) * s[:, None]
    K = 0.5 * (K + K.T)
    if gamma:
        K = K + gamma * np.eye(adjacency.n)
    return from_dense(K, psd_margin=float(gamma))


def apply_difference(pi, kernel):
    """Kernel-weighted pairwise column differences of pi."""
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (kernel.n, kernel.n):
        raise DimensionMismatch(
            f"expected shape {(kernel.n, kernel.n)}, got {pi.shape}")
    i, j = kernel.edges[:, 0], kernel.edges[:, 1]
    blocks = (pi[:, i] - pi[:, j]) * kernel.weights[None, :]
    return DifferenceImage(blocks=blocks, n=kernel.n, n_edges=kernel.n_edges)


def apply_difference_adjoint(d, kernel):
    """Adjoint of apply_difference: scatter edge blocks back to columns."""
    blocks = d.blocks if isinstance(d, DifferenceImage) else np.asarray(d)
    if blocks.shape != (kernel.n, kernel.n_edges):
        raise DimensionMismatch(
            f"expected blocks of shape {(kernel.n, kernel.n_edges)}, "
            f"got {blocks.shape}")
    return np.ascontiguousarray((kernel.incidence @ blocks.T).T)


def lipschitz_constant(kernel, lam, alpha):
    """Lipschitz constant of the dual gradient.

    16 lam^2 max(alpha, 1-alpha)^2 max_i ||K_i||_2^2, with K_i the i-th
    column of K including its diagonal entry.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    col = kernel.column_norms()
    cmax = float(col.max()) if col.size else 0.0
    amax = max(alpha, 1.0 - alpha)
    return 16.0 * lam ** 2 * amax ** 2 * cmax ** 2


def read_edge_list(path):
    """Read `u<TAB>v<TAB>w` lines; `#` starts a comment line."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'u<TAB>v<TAB>w'")
            rows.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return from_edge_list(rows)


def write_edge_list(kernel, path):
    with open(path, "w", encoding="utf-8") as fh:
        for k in range(kernel.n):
            if kernel.diagonal[k] != 0.0:
                fh.write(f"{k}\t{k}\t{kernel.diagonal[k]:.17g}\n")
        for (i, j), w in zip(kernel.edges, kernel.weights):
            fh.write(f"{i}\t{j}\t{w:.17g}\n")


def read_dense_csv(path):
    """Read an N x N kernel stored as header-less CSV."""
    K = np.loadtxt(path, delimiter=",", ndmin=2)
    return from_dense(K)


def write_dense_csv(matrix, path):
    np.savetxt(path, np.asarray(matrix), delimiter=",", fmt="%.17g")
