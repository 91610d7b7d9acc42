"""Evaluation machinery: centroid similarity, effective rank, cluster
extraction, k-means, and cluster-quality scores."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .errors import (
    DimensionMismatch,
    IndefiniteInput,
    LengthMismatch,
    ZeroMatrix,
)


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    k: int
    method: str
    quality: dict = field(default_factory=dict)
    degenerate: bool = False


def centroid_similarity(pi, kernel):
    """Inner-product similarity between centroids: pi^T K pi."""
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (kernel.n, kernel.n):
        raise DimensionMismatch(
            f"expected {(kernel.n, kernel.n)}, got {pi.shape}")
    S = pi.T @ kernel.matvec(pi)
    return 0.5 * (S + S.T)


def similarity_to_distance(sim):
    """Squared distances d2_ij = S_ii + S_jj - 2 S_ij from a similarity."""
    d = np.diag(sim)
    d2 = d[:, None] + d[None, :] - 2.0 * sim
    return np.maximum(d2, 0.0)


def effective_rank(m):
    """Exponential of the Shannon entropy of the eigenvalue distribution.

    Lies in [1, N]; equals the rank when the nonzero eigenvalues are
    uniform.  Eigenvalues mildly below zero are clamped; clearly negative
    ones are rejected.
    """
    m = np.asarray(m, dtype=np.float64)
    evals = np.linalg.eigvalsh(0.5 * (m + m.T))
    scale = max(1.0, float(np.abs(evals).max()) if evals.size else 1.0)
    if evals.min() < -1e-8 * scale:
        raise IndefiniteInput(
            f"eigenvalue {evals.min():.3e} below tolerance")
    evals = np.maximum(evals, 0.0)
    total = evals.sum()
    if total == 0.0:
        raise ZeroMatrix("all eigenvalues are zero")
    p = evals / total
    p = p[p > 0]
    return float(np.exp(-np.sum(p * np.log(p))))


def extract_clusters_by_fusion(pi, epsilon):
    """Connected components of the graph with edges ||pi_i - pi_j|| <= eps."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    pi = np.asarray(pi, dtype=np.float64)
    n = pi.shape[1]
    d = cdist(pi.T, pi.T)
    labels = -np.ones(n, dtype=np.int64)
    nxt = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        stack = [start]
        labels[start] = nxt
        while stack:
            v = stack.pop()
            for w in np.flatnonzero((d[v] <= epsilon) & (labels < 0)):
                labels[w] = nxt
                stack.append(w)
        nxt += 1
    return ClusterAssignment(labels=labels, k=nxt, method="fusion")


def default_fusion_epsilon(n):
    """Fusion threshold scaled with the column dimension."""
    return 1e-6 * np.sqrt(n)


def _kmeans_pp_init(points, k, rng):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    idx = rng.integers(n)
    centers[0] = points[idx]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = points[rng.integers(n)]
            continue
        probs = d2 / total
        idx = rng.choice(n, p=probs)
        centers[c] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(points, centers, max_iter=300):
    inertia_prev = np.inf
    labels = None
    for _ in range(max_iter):
        d2 = cdist(points, centers, metric="sqeuclidean")
        labels = d2.argmin(axis=1)
        inertia = float(d2[np.arange(points.shape[0]), labels].sum())
        for c in range(centers.shape[0]):
            members = points[labels == c]
            if members.size:
                centers[c] = members.mean(axis=0)
        if inertia >= inertia_prev - 1e-12:
            break
        inertia_prev = inertia
    return labels, centers, inertia


def kmeans(points, k, seed=0, restarts=10):
    """Best-of-restarts Lloyd iterations with k-means++ seeding.

    Deterministic for a fixed seed.  If the data has fewer distinct
    points than k, each distinct point becomes its own cluster and the
    result is flagged degenerate.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k > n:
        raise ValueError("k must not exceed the number of points")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    distinct, inverse = np.unique(points.round(12), axis=0,
                                  return_inverse=True)
    if distinct.shape[0] < k:
        return ClusterAssignment(labels=inverse.astype(np.int64),
                                 k=distinct.shape[0], method="kmeans",
                                 degenerate=True)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        centers = _kmeans_pp_init(points, k, rng)
        labels, centers, inertia = _lloyd(points, centers.copy())
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    labels = _relabel_nonempty(best[0], k)
    return ClusterAssignment(labels=labels, k=int(labels.max()) + 1,
                             method="kmeans",
                             quality={"inertia": best[2]})


def _relabel_nonempty(labels, k):
    used = np.unique(labels)
    remap = {int(u): i for i, u in enumerate(used)}
    return np.array([remap[int(x)] for x in labels], dtype=np.int64)


def _contingency(pred, truth):
    pu, pi_ = np.unique(pred, return_inverse=True)
    tu, ti = np.unique(truth, return_inverse=True)
    C = np.zeros((pu.size, tu.size), dtype=np.int64)
    np.add.at(C, (pi_, ti), 1)
    return C


def matching_accuracy(pred, truth):
    """Maximum agreement over cluster-to-class assignments.

    Optimal one-to-one matching (Hungarian) when cluster and class counts
    coincide; majority-label mapping otherwise.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise LengthMismatch("label vectors differ in length")
    C = _contingency(pred, truth)
    n = pred.size
    if C.shape[0] == C.shape[1]:
        r, c = linear_sum_assignment(-C)
        return float(C[r, c].sum()) / n
    return float(C.max(axis=1).sum()) / n


def _entropy(counts):
    counts = counts[counts > 0].astype(np.float64)
    total = counts.sum()
    p = counts / total
    return float(-np.sum(p * np.log(p)))


def homogeneity_completeness(pred, truth):
    """Standard conditional-entropy cluster scores, both in [0, 1]."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise LengthMismatch("label vectors differ in length")
    C = _contingency(pred, truth).astype(np.float64)
    n = C.sum()
    h_truth = _entropy(C.sum(axis=0))
    h_pred = _entropy(C.sum(axis=1))
    # H(truth | pred)
    h_t_given_p = 0.0
    for row in C:
        if row.sum() > 0:
            h_t_given_p += (row.sum() / n) * _entropy(row)
    h_p_given_t = 0.0
    for col in C.T:
        if col.sum() > 0:
            h_p_given_t += (col.sum() / n) * _entropy(col)
    hom = 1.0 if h_truth == 0.0 else 1.0 - h_t_given_p / h_truth
    com = 1.0 if h_pred == 0.0 else 1.0 - h_p_given_t / h_pred
    return hom, com


def silhouette_score(points, labels):
    """Mean silhouette coefficient with Euclidean distances."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    n = points.shape[0]
    uniq = np.unique(labels)
    if uniq.size < 2 or uniq.size >= n:
        return 0.0
    D = cdist(points, points)
    s = np.zeros(n)
    for i in range(n):
        own = labels == labels[i]
        n_own = own.sum()
        if n_own <= 1:
            s[i] = 0.0
            continue
        a = D[i, own].sum() / (n_own - 1)
        b = min(D[i, labels == c].mean() for c in uniq if c != labels[i])
        s[i] = (b - a) / max(a, b) if max(a, b) > 0 else 0.0
    return float(s.mean())


def cluster_scores(pred, truth, points=None):
    """Quality record: matching accuracy, homogeneity, completeness, and
    (with points) the silhouette of the predicted clustering."""
    labels = pred.labels if isinstance(pred, ClusterAssignment) else np.asarray(pred)
    truth = np.asarray(truth)
    if labels.shape != truth.shape:
        raise LengthMismatch("label vectors differ in length")
    hom, com = homogeneity_completeness(labels, truth)
    out = {
        "accuracy": matching_accuracy(labels, truth),
        "homogeneity": hom,
        "completeness": com,
    }
    if points is not None:
        out["silhouette"] = silhouette_score(points, labels)
    return out
