import numpy as np
import pytest

from graphcoalesce import (
    centroid_similarity,
    cluster_scores,
    effective_rank,
    extract_clusters_by_fusion,
    from_dense,
    homogeneity_completeness,
    kmeans,
    matching_accuracy,
    silhouette_score,
)
from graphcoalesce.errors import IndefiniteInput, LengthMismatch, ZeroMatrix
from graphcoalesce.metrics import (
    default_fusion_epsilon,
    similarity_to_distance,
)

from conftest import random_pd_kernel


class TestCentroidSimilarity:
    def test_identity_returns_kernel(self):
        k = random_pd_kernel(5, 0)
        assert np.allclose(centroid_similarity(np.eye(5), k), k.dense(),
                           atol=1e-12)

    def test_consensus_constant(self):
        k = random_pd_kernel(4, 1)
        K = k.dense()
        cons = np.full((4, 4), 0.25)
        S = centroid_similarity(cons, k)
        expected = float(np.ones(4) @ K @ np.ones(4)) / 16.0
        assert np.allclose(S, expected, atol=1e-12)

    def test_psd_preserved(self):
        k = random_pd_kernel(6, 2)
        rng = np.random.default_rng(3)
        pi = rng.random((6, 6))
        S = centroid_similarity(pi, k)
        assert np.allclose(S, S.T)
        assert np.linalg.eigvalsh(S).min() >= -1e-10

    def test_spectral_factor_identity(self):
        # S_ij equals <Phi pi_i, Phi pi_j> with Phi an explicit root of K
        k = random_pd_kernel(6, 4)
        w, V = np.linalg.eigh(k.dense())
        Phi = (V * np.sqrt(np.maximum(w, 0))) @ V.T
        rng = np.random.default_rng(5)
        pi = rng.random((6, 6))
        S = centroid_similarity(pi, k)
        assert np.allclose(S, (Phi @ pi).T @ (Phi @ pi), atol=1e-8)

    def test_distance_conversion(self):
        k = random_pd_kernel(4, 6)
        rng = np.random.default_rng(7)
        pi = rng.random((4, 4))
        S = centroid_similarity(pi, k)
        d2 = similarity_to_distance(S)
        assert np.allclose(np.diag(d2), 0.0, atol=1e-10)
        assert d2.min() >= 0.0


class TestEffectiveRank:
    def test_uniform_spectrum(self):
        assert effective_rank(3.7 * np.eye(6)) == pytest.approx(6.0)

    def test_rank_one(self):
        m = np.zeros((4, 4))
        m[0, 0] = 1.0
        assert effective_rank(m) == pytest.approx(1.0)

    def test_hand_value(self):
        m = np.diag([0.75, 0.25])
        expected = np.exp(-(0.75 * np.log(0.75) + 0.25 * np.log(0.25)))
        assert effective_rank(m) == pytest.approx(expected, rel=1e-10)

    def test_range(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            B = rng.standard_normal((5, 5))
            er = effective_rank(B @ B.T)
            assert 1.0 - 1e-9 <= er <= 5.0 + 1e-9

    def test_indefinite_rejected(self):
        with pytest.raises(IndefiniteInput):
            effective_rank(np.diag([1.0, -0.5]))

    def test_zero_rejected(self):
        with pytest.raises(ZeroMatrix):
            effective_rank(np.zeros((3, 3)))


class TestFusionExtraction:
    def test_identity_singletons(self):
        asg = extract_clusters_by_fusion(np.eye(4), 0.5)
        assert asg.k == 4

    def test_consensus_one_cluster(self):
        asg = extract_clusters_by_fusion(np.full((4, 4), 0.25), 0.0)
        assert asg.k == 1

    def test_two_groups(self):
        pi = np.eye(4)
        pi[:, 1] = pi[:, 0]
        pi[:, 3] = pi[:, 2]
        asg = extract_clusters_by_fusion(pi, 1e-9)
        assert asg.k == 2

    def test_monotone_in_epsilon(self):
        rng = np.random.default_rng(9)
        pi = rng.random((6, 6))
        fine = extract_clusters_by_fusion(pi, 0.1).labels
        coarse = extract_clusters_by_fusion(pi, 2.0).labels
        # fine refines coarse: same fine label -> same coarse label
        for a in range(6):
            for b in range(6):
                if fine[a] == fine[b]:
                    assert coarse[a] == coarse[b]

    def test_default_epsilon_scales(self):
        assert default_fusion_epsilon(100) == pytest.approx(1e-5)


class TestKmeans:
    def test_separated_pairs(self):
        pts = np.array([[0, 0], [0.1, 0], [10, 10], [10.1, 10]])
        asg = kmeans(pts, 2, seed=0)
        assert asg.labels[0] == asg.labels[1]
        assert asg.labels[2] == asg.labels[3]
        assert asg.labels[0] != asg.labels[2]

    def test_k_equals_n(self):
        rng = np.random.default_rng(10)
        pts = rng.random((5, 3))
        asg = kmeans(pts, 5, seed=1)
        assert asg.k == 5
        assert asg.quality["inertia"] == pytest.approx(0.0, abs=1e-12)

    def test_k_one(self):
        rng = np.random.default_rng(11)
        pts = rng.random((6, 2))
        asg = kmeans(pts, 1, seed=0)
        assert asg.k == 1

    def test_deterministic(self):
        rng = np.random.default_rng(12)
        pts = rng.random((20, 4))
        a = kmeans(pts, 3, seed=7).labels
        b = kmeans(pts, 3, seed=7).labels
        assert np.array_equal(a, b)

    def test_degenerate_flag(self):
        pts = np.array([[1.0, 0.0]] * 4 + [[0.0, 1.0]] * 4)
        asg = kmeans(pts, 5, seed=0)
        assert asg.degenerate
        assert asg.k == 2

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((3, 2)), 4)


class TestScores:
    def test_perfect(self):
        pred = np.array([0, 0, 1, 1])
        assert matching_accuracy(pred, pred) == 1.0
        hom, com = homogeneity_completeness(pred, pred)
        assert hom == 1.0 and com == 1.0

    def test_single_cluster_degenerate(self):
        pred = np.zeros(4, dtype=int)
        truth = np.array([0, 0, 1, 1])
        assert matching_accuracy(pred, truth) == 0.5
        hom, com = homogeneity_completeness(pred, truth)
        assert hom == 0.0 and com == 1.0

    def test_crossed_pairs(self):
        pred = np.array([0, 0, 1, 1])
        truth = np.array([0, 1, 0, 1])
        assert matching_accuracy(pred, truth) == 0.5

    def test_majority_mapping_when_k_differs(self):
        pred = np.array([0, 0, 1, 1, 2, 2])
        truth = np.array([0, 0, 0, 0, 1, 1])
        assert matching_accuracy(pred, truth) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            matching_accuracy(np.zeros(3), np.zeros(4))

    def test_against_sklearn_entropy_scores(self):
        pytest.importorskip("sklearn")
        from sklearn.metrics import (
            completeness_score,
            homogeneity_score,
            silhouette_score as sk_sil,
        )

        rng = np.random.default_rng(13)
        pred = rng.integers(0, 3, 40)
        truth = rng.integers(0, 4, 40)
        hom, com = homogeneity_completeness(pred, truth)
        assert hom == pytest.approx(homogeneity_score(truth, pred), abs=1e-10)
        assert com == pytest.approx(completeness_score(truth, pred),
                                    abs=1e-10)
        pts = rng.random((40, 3))
        assert silhouette_score(pts, pred) == pytest.approx(
            sk_sil(pts, pred), abs=1e-10)

    def test_cluster_scores_record(self):
        pred = np.array([0, 0, 1, 1])
        truth = np.array([1, 1, 0, 0])
        rng = np.random.default_rng(14)
        out = cluster_scores(pred, truth, points=rng.random((4, 2)))
        assert out["accuracy"] == 1.0
        assert set(out) == {"accuracy", "homogeneity", "completeness",
                            "silhouette"}


class TestSilhouette:
    def test_two_tight_clusters(self):
        pts = np.vstack([np.zeros((5, 2)) + np.arange(5)[:, None] * 0.01,
                         np.ones((5, 2)) * 10 + np.arange(5)[:, None] * 0.01])
        labels = np.array([0] * 5 + [1] * 5)
        assert silhouette_score(pts, labels) > 0.95

    def test_single_cluster_zero(self):
        pts = np.random.default_rng(0).random((5, 2))
        assert silhouette_score(pts, np.zeros(5, dtype=int)) == 0.0
