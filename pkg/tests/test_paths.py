import json

import numpy as np
import pytest

from graphcoalesce import (
    compute_path,
    default_lambda_grid,
    read_path,
    write_path,
)
from graphcoalesce.projections import ProjectionConfig

from conftest import random_pd_kernel


FAST_OPTS = {"inner_tol": 1e-6, "outer_tol": 1e-6,
             "inner_max_iter": 1000, "outer_max_iter": 300}


class TestComputePath:
    def test_single_zero_lambda_identity(self):
        k = random_pd_kernel(5, 0)
        path = compute_path(k, [0.0], solver_opts=FAST_OPTS)
        assert len(path.entries) == 1
        assert np.linalg.norm(path.entries[0].pi - np.eye(5)) <= 1e-3

    def test_large_lambda_consensus(self, two_triangles):
        n = two_triangles.n
        # default (tight) solver options: the huge-lam subproblem needs
        # the full inner budget to reach consensus accuracy
        path = compute_path(two_triangles, [1e6])
        assert np.linalg.norm(path.entries[0].pi
                              - np.full((n, n), 1.0 / n)) <= 1e-3

    def test_effective_rank_declines(self, two_triangles):
        lams = [1e-6, 0.5, 100.0]
        path = compute_path(two_triangles, lams, solver_opts=FAST_OPTS)
        ers = [e.effective_rank for e in path.entries]
        assert ers[0] > ers[-1]
        assert ers[-1] <= 0.5 * ers[0]

    def test_warm_start_continuity(self):
        k = random_pd_kernel(5, 1)
        lams = [0.1, 0.12]
        path = compute_path(k, lams, solver_opts=FAST_OPTS)
        d = np.linalg.norm(path.entries[0].pi - path.entries[1].pi)
        assert d <= 0.5  # neighbors on the path stay close

    def test_rejects_decreasing_grid(self):
        k = random_pd_kernel(4, 2)
        with pytest.raises(ValueError):
            compute_path(k, [1.0, 0.5])

    def test_rejects_negative(self):
        k = random_pd_kernel(4, 3)
        with pytest.raises(ValueError):
            compute_path(k, [-1.0])

    @pytest.mark.parametrize("solver", ["admm", "linearized"])
    def test_other_solvers_run(self, solver):
        k = random_pd_kernel(4, 4)
        path = compute_path(k, [0.1], solver=solver)
        assert not path.entries[0].failed
        assert path.solver_id == solver

    def test_fingerprint_recorded(self):
        k = random_pd_kernel(4, 5)
        path = compute_path(k, [0.1], solver_opts=FAST_OPTS)
        assert path.kernel_fingerprint == k.fingerprint()


class TestGrid:
    def test_default_grid_shape(self):
        g = default_lambda_grid()
        assert g.size == 40
        assert g[0] == pytest.approx(1e-3)
        assert g[-1] == pytest.approx(40.0)
        assert np.all(np.diff(g) > 0)


class TestPathIO:
    def _small_path(self):
        k = random_pd_kernel(4, 6)
        return compute_path(k, [0.05, 0.2], solver_opts=FAST_OPTS)

    def test_roundtrip(self, tmp_path):
        path = self._small_path()
        outdir = tmp_path / "run"
        manifest = write_path(path, outdir)
        back = read_path(outdir)
        assert back.kernel_fingerprint == path.kernel_fingerprint
        assert len(back.entries) == 2
        for a, b in zip(back.entries, path.entries):
            assert a.lam == b.lam
            assert np.allclose(a.pi, b.pi)
            assert a.primal_value == b.primal_value
        assert manifest.endswith("manifest.json")

    def test_manifest_written_last(self, tmp_path):
        path = self._small_path()
        outdir = tmp_path / "run"
        write_path(path, outdir)
        with open(outdir / "manifest.json", encoding="utf-8") as fh:
            manifest = json.load(fh)
        for rec in manifest["entries"]:
            assert (outdir / rec["pi_file"]).exists()

    def test_deterministic_manifest(self, tmp_path):
        path = self._small_path()
        d1, d2 = tmp_path / "a", tmp_path / "b"
        write_path(path, d1)
        write_path(path, d2)
        assert (d1 / "manifest.json").read_bytes() == \
            (d2 / "manifest.json").read_bytes()
