import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from split_cg.diagnostics import finite_difference_gradient
from split_cg.errors import DimensionMismatchError
from split_cg.objective import (
    IndefiniteQuadratic,
    LeastSquares,
    LinearObjective,
    PenalizedObjective,
    Quadratic,
    descent_lemma_gap,
    penalized_descent_gap,
    penalized_eval,
    penalized_grad,
    random_indefinite_quadratic,
    shifted_identity,
)
from split_cg.space import ProductPoint, Weights, average, lift, to_weighted_gradient

HALF = Weights([0.5, 0.5])


class TestObjectives:
    def test_quadratic(self):
        f = Quadratic([1.0, 2.0])
        assert f.value(np.array([1.0, 0.0])) == pytest.approx(2.0)
        assert_allclose(f.gradient(np.array([0.0, 0.0])), [-1.0, -2.0])
        assert f.lipschitz == 1.0
        assert f.is_convex

    def test_least_squares_lipschitz(self):
        mat = np.array([[2.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        f = LeastSquares(mat, [1.0, 1.0, 1.0])
        assert f.lipschitz == pytest.approx(4.0)
        assert f.value(np.zeros(2)) == pytest.approx(1.5)

    def test_least_squares_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            LeastSquares(np.eye(2), [1.0, 2.0, 3.0])

    def test_indefinite_quadratic(self):
        f = IndefiniteQuadratic(np.diag([1.0, -2.0]), [0.0, 1.0])
        assert f.lipschitz == pytest.approx(2.0)
        assert not f.is_convex
        assert f.value(np.array([1.0, 1.0])) == pytest.approx(0.5 - 1.0 + 1.0)

    def test_indefinite_quadratic_needs_symmetry(self):
        with pytest.raises(ValueError):
            IndefiniteQuadratic(np.array([[0.0, 1.0], [0.0, 0.0]]), [0.0, 0.0])

    def test_linear(self):
        f = LinearObjective([1.0, -1.0])
        assert f.lipschitz == 0.0
        assert_allclose(f.gradient(np.zeros(2)), [1.0, -1.0])

    def test_random_indefinite_quadratic_spectrum(self):
        f = random_indefinite_quadratic(6, seed=3)
        eigs = np.linalg.eigvalsh(f.matrix)
        assert eigs[0] == pytest.approx(-1.0)
        assert eigs[-1] == pytest.approx(1.0)
        assert f.lipschitz == pytest.approx(1.0)
        assert_allclose(random_indefinite_quadratic(6, seed=3).matrix, f.matrix)

    @pytest.mark.parametrize(
        'f', [Quadratic([0.5, -1.0, 2.0]), LeastSquares(np.arange(6.0).reshape(2, 3), [1.0, 0.0]),
              random_indefinite_quadratic(3, seed=1), LinearObjective([1.0, 2.0, 3.0])],
        ids=lambda f: f.kind,
    )
    def test_values_match_value(self, f):
        points = np.random.default_rng(0).standard_normal((10, 3))
        assert_allclose(f.values(points), [f.value(p) for p in points])

    @pytest.mark.parametrize('seed', range(5))
    def test_descent_lemma(self, seed):
        rng = np.random.default_rng(seed)
        f = random_indefinite_quadratic(5, seed=seed)
        assert descent_lemma_gap(f, rng.standard_normal(5), rng.standard_normal(5), f.lipschitz) >= -1e-12


class TestPenalizedObjective:
    def test_interval_hand_value(self):
        F = PenalizedObjective(base=Quadratic([0.0]), lam=1.0, weights=HALF)
        assert penalized_eval(F, ProductPoint([[1.0], [0.0]])) == pytest.approx(0.25)

    def test_vanishes_on_diagonal(self):
        f = Quadratic([1.0, 1.0])
        x = lift([0.2, 0.4], 2)
        F = PenalizedObjective(base=f, lam=7.0, weights=HALF)
        assert penalized_eval(F, x) == pytest.approx(f.value(np.array([0.2, 0.4])))
        for block in penalized_grad(F, x).blocks:
            assert_allclose(block, f.gradient(np.array([0.2, 0.4])))

    def test_zero_penalty_is_minkowski_objective(self):
        f = Quadratic([1.0])
        x = ProductPoint([[0.0], [3.0]])
        F = PenalizedObjective(base=f, lam=0.0, weights=HALF)
        assert penalized_eval(F, x) == pytest.approx(f.value(average(x, HALF)))
        assert_allclose(penalized_grad(F, x).data, [[0.5], [0.5]])

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            PenalizedObjective(base=Quadratic([0.0]), lam=-1.0, weights=HALF)

    def test_is_frozen_and_validated(self):
        F = PenalizedObjective(base=Quadratic([0.0]), lam=1.0, weights=HALF)
        with pytest.raises(ValidationError):
            F.lam = 2.0
        with pytest.raises(ValidationError):
            PenalizedObjective(base=Quadratic([0.0]), lam=float('nan'), weights=HALF)
        assert F.with_lambda(3.0).lam == 3.0
        with pytest.raises(ValidationError):
            F.with_lambda(-0.5)

    @pytest.mark.parametrize('seed', range(5))
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        w = Weights(rng.dirichlet(np.full(3, 5.0)))
        F = PenalizedObjective(base=random_indefinite_quadratic(4, seed=seed), lam=2.5, weights=w)
        x = ProductPoint(rng.standard_normal((3, 4)))
        numeric = to_weighted_gradient(finite_difference_gradient(F.value, x, h=1e-3), w)
        assert_allclose(numeric.data, penalized_grad(F, x).data, rtol=1e-6, atol=1e-8)

    @pytest.mark.parametrize('seed', range(5))
    def test_shifted_identity(self, seed):
        rng = np.random.default_rng(seed)
        F = PenalizedObjective(base=Quadratic(rng.standard_normal(3)), lam=1.0, weights=Weights([0.2, 0.3, 0.5]))
        lhs, rhs = shifted_identity(F, 2.5, ProductPoint(rng.standard_normal((3, 3))))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_shifted_identity_trivial_cases(self):
        F = PenalizedObjective(base=Quadratic([0.0]), lam=1.0, weights=HALF)
        x = ProductPoint([[0.0], [2.0]])
        lhs, rhs = shifted_identity(F, 0.0, x)
        assert lhs == rhs
        lhs, rhs = shifted_identity(F, 100.0, lift([0.7], 2))
        assert lhs == pytest.approx(rhs)

    @pytest.mark.parametrize('seed', range(5))
    def test_penalized_descent_lemma(self, seed):
        rng = np.random.default_rng(seed)
        F = PenalizedObjective(base=random_indefinite_quadratic(3, seed=seed), lam=4.0, weights=Weights([0.4, 0.6]))
        x = ProductPoint(rng.standard_normal((2, 3)))
        y = ProductPoint(rng.standard_normal((2, 3)))
        assert penalized_descent_gap(F, x, y) >= -1e-10
