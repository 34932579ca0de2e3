import numpy as np
import pytest
from numpy.testing import assert_allclose

from split_cg.linalg import min_eigenvector, top_eigenpair_psd, top_singular_pair


class TestPowerIteration:
    @pytest.mark.parametrize('seed', range(3))
    def test_top_eigenvalue_matches_dense(self, seed):
        g = np.random.default_rng(seed).standard_normal((8, 8))
        mat = g @ g.T
        value, v = top_eigenpair_psd(mat)
        assert value == pytest.approx(np.linalg.eigvalsh(mat)[-1], rel=1e-8)
        assert np.linalg.norm(v) == pytest.approx(1.0)

    @pytest.mark.parametrize('seed', range(3))
    def test_top_singular_value_matches_svd(self, seed):
        mat = np.random.default_rng(seed).standard_normal((6, 4))
        u, sigma, v = top_singular_pair(mat)
        assert sigma == pytest.approx(np.linalg.svd(mat, compute_uv=False)[0], rel=1e-6)
        assert float(u @ mat @ v) == pytest.approx(sigma, rel=1e-6)

    def test_zero_matrix(self):
        u, sigma, v = top_singular_pair(np.zeros((3, 2)))
        assert sigma == 0.0
        assert_allclose(u, [1.0, 0.0, 0.0])
        assert_allclose(v, [1.0, 0.0])

    def test_min_eigenvector(self):
        v = min_eigenvector(np.diag([1.0, -1.0, 0.5]), shift=2.0)
        assert abs(v[1]) == pytest.approx(1.0, abs=1e-8)

    def test_deterministic(self):
        mat = np.random.default_rng(7).standard_normal((5, 5))
        first = top_singular_pair(mat)
        second = top_singular_pair(mat)
        assert_allclose(first[0], second[0], rtol=0, atol=0)
