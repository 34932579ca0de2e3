import numpy as np
import pytest
from numpy.testing import assert_allclose

from split_cg.diagnostics import (
    GridOracle,
    decomposition_identity,
    diagonal_decomposition_check,
    feasibility_equivalence,
    finite_difference_gradient,
    g_penalty,
    gap_bound_check,
    gbound_check,
    interval_analytic_minimizer,
    interval_example,
    interval_optimal_value,
    limit_of_infima,
    penalty_d,
    penalty_report,
    recurrence_check,
    regularization_path,
    sandwich_check,
)
from split_cg.errors import CapabilityError, InstanceTooLargeError
from split_cg.objective import (
    LinearObjective,
    PenalizedObjective,
    Quadratic,
    penalized_eval,
    random_indefinite_quadratic,
)
from split_cg.sets import Box, EuclideanBall, L1Ball, NuclearBall, ProductConstraint, Simplex, Singleton
from split_cg.solver import RateConstants, Schedule, scg_solve
from split_cg.space import ProductPoint, Weights, dist_diag_sq, lift, penalty_grad, to_weighted_gradient


class TestPenalties:
    def test_d_by_hand(self, interval):
        _, pc = interval
        assert penalty_d(ProductPoint([[1.0], [-2.0]]), pc) == pytest.approx(1.125)

    def test_d_zero_when_average_in_intersection(self, interval):
        _, pc = interval
        assert penalty_d(ProductPoint([[1.0], [1.0]]), pc) == 0.0

    def test_d_needs_projections(self):
        pc = ProductConstraint([NuclearBall(1.0, 2, 2), NuclearBall(2.0, 2, 2)])
        with pytest.raises(CapabilityError):
            penalty_d(pc.random_feasible(0), pc)

    @pytest.mark.parametrize('seed', range(20))
    def test_d_between_zero_and_dist(self, two_boxes, seed):
        x = two_boxes.random_feasible(seed)
        d = penalty_d(x, two_boxes)
        assert 0.0 <= d <= dist_diag_sq(x, two_boxes.weights) + 1e-12
        assert d <= g_penalty(x, two_boxes) + 1e-12

    def test_identity_by_hand(self, interval):
        _, pc = interval
        residual, _ = decomposition_identity(ProductPoint([[1.0], [-2.0]]), pc)
        assert residual <= 1e-12

    def test_identity_on_feasible_diagonal_point(self, two_boxes):
        residual, cross = decomposition_identity(lift([0.5, 0.5], 2), two_boxes)
        assert residual == pytest.approx(0.0, abs=1e-15)
        assert cross == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize('seed', range(50))
    def test_identity_sign_condition(self, two_boxes, seed):
        residual, cross = decomposition_identity(two_boxes.random_feasible(seed), two_boxes)
        assert residual <= 1e-9
        assert cross <= 1e-9

    def test_report_for_catalog_instance(self, two_boxes):
        report = penalty_report(two_boxes.random_feasible(3), two_boxes)
        assert report.g_value is not None and report.d_value is not None
        assert report.orthogonal_decomposition_residual <= 1e-9

    def test_report_without_intersection(self):
        pc = ProductConstraint([Box(-1.0, 1.0, dimension=2), EuclideanBall(1.0, dimension=2)])
        report = penalty_report(pc.random_feasible(0), pc)
        assert report.g_value is None
        assert report.d_value is not None


class TestEquivalence:
    def test_diagonal_feasible(self, interval):
        _, pc = interval
        assert feasibility_equivalence(lift([1.0], 2), pc) == (True, True, True)

    def test_average_outside(self, interval):
        _, pc = interval
        assert feasibility_equivalence(ProductPoint([[1.0], [-2.0]]), pc) == (False, False, False)

    def test_off_diagonal_point_with_feasible_average(self):
        pc = ProductConstraint([Box(-1.0, 1.0, dimension=2), Box(0.0, 2.0, dimension=2)])
        x = ProductPoint([[0.2, 0.2], [0.8, 0.8]])
        assert feasibility_equivalence(x, pc) == (True, True, True)
        assert dist_diag_sq(x, pc.weights) > 0

    @pytest.mark.parametrize('excess', [5e-10, 1e-9 - 1e-12])
    def test_boundary_within_tolerance(self, excess):
        pc = ProductConstraint([Box(0.0, 1.0, dimension=1), Box(0.0, 1.0, dimension=1)], Weights([0.1, 0.9]))
        x = lift([1.0 + excess], 2)
        assert feasibility_equivalence(x, pc) == (True, True, True)

    def test_boundary_beyond_tolerance(self):
        pc = ProductConstraint([Box(0.0, 1.0, dimension=2), Box(0.0, 1.0, dimension=2)], Weights([0.1, 0.9]))
        assert feasibility_equivalence(lift([1.0 + 1e-6, 0.5], 2), pc) == (False, False, False)

    @pytest.mark.parametrize('seed', range(30))
    def test_three_statements_agree(self, seed):
        pc = ProductConstraint([Box(-1.0, 1.0, dimension=3), L1Ball(1.5, dimension=3),
                                EuclideanBall(1.2, center=[0.3, 0.0, 0.0])])
        assert len(set(feasibility_equivalence(pc.random_feasible(seed), pc))) == 1

    @pytest.mark.parametrize('seed', range(10))
    def test_diagonal_decomposition(self, two_boxes, seed):
        point = np.random.default_rng(seed).uniform(-1.5, 2.5, size=2)
        lifted, in_meet = diagonal_decomposition_check(point, two_boxes)
        assert lifted == in_meet


class TestFiniteDifferences:
    @pytest.mark.parametrize('seed', range(5))
    def test_penalty_gradient(self, seed):
        rng = np.random.default_rng(seed)
        w = Weights(rng.dirichlet(np.full(3, 5.0)))
        x = ProductPoint(rng.standard_normal((3, 10)))
        numeric = finite_difference_gradient(lambda p: 0.5 * dist_diag_sq(p, w), x, h=1e-3)
        assert_allclose(to_weighted_gradient(numeric, w).data, penalty_grad(x, w).data, rtol=1e-6, atol=1e-8)


class TestBounds:
    @pytest.mark.parametrize('seed', range(50))
    def test_gbound_random_pairs(self, interval, seed):
        _, pc = interval
        assert gbound_check(pc.random_feasible(2 * seed), pc.random_feasible(2 * seed + 1), pc)

    def test_gbound_extreme_pair(self, interval):
        _, pc = interval
        x, y = ProductPoint([[1.0], [-2.0]]), ProductPoint([[1.0], [2.0]])
        assert gbound_check(x, y, pc)
        assert gbound_check(x, x, pc)

    @pytest.mark.parametrize('lam', [0.0, 1.0, 10.0])
    @pytest.mark.parametrize('seed', range(10))
    def test_gap_bound_chain(self, interval, lam, seed):
        f, pc = interval
        result = gap_bound_check(pc.random_feasible(seed), f, pc, lam)
        assert result.holds
        assert result.lower_bound == pytest.approx(-1.5 * 2.0)

    def test_gap_bound_on_feasible_diagonal_point(self, interval):
        f, pc = interval
        result = gap_bound_check(lift([1.0], 2), f, pc, 5.0)
        assert result.subproblem_gap >= result.inner_gap >= -1e-12


class TestIntervalExample:
    def test_minimizer(self):
        x, mean = interval_analytic_minimizer(1.0, 1.0)
        assert x == ProductPoint([[1.0], [0.0]])
        assert mean == pytest.approx(0.5)

    def test_minimizer_without_penalty(self):
        x, mean = interval_analytic_minimizer(1.0, 0.0)
        assert x.block(1)[0] == -1.0
        assert mean == 0.0

    def test_minimizer_limit(self):
        _, mean = interval_analytic_minimizer(1.0, 1e9)
        assert mean == pytest.approx(1.0, abs=1e-8)

    def test_optimal_value(self, interval):
        f, pc = interval
        for lam in (0.0, 1.0, 10.0):
            x, _ = interval_analytic_minimizer(1.0, lam)
            F = PenalizedObjective(base=f, lam=lam, weights=pc.weights)
            assert penalized_eval(F, x) == pytest.approx(interval_optimal_value(1.0, lam))

    def test_rejects_z_outside_box(self):
        with pytest.raises(ValueError):
            interval_example(3.0)

    def test_regularization_path(self):
        path = regularization_path(1.0, [0.0, 1.0, 10.0, 100.0])
        assert list(path.columns) == ['lambda', 'average', 'f_value', 'dist_sq']
        assert np.all(np.diff(path['f_value']) >= 0)
        assert np.all(np.diff(path['dist_sq']) <= 0)


class TestRecurrence:
    def test_convex_trace_replay(self, interval):
        f, pc = interval
        schedule = Schedule(kind='convex', lambda0=1.0)
        result = scg_solve(f, pc, schedule, lift([1.0], 2), 10_000)
        constants = RateConstants.for_problem(f, pc, 1.0)
        report = recurrence_check(result.trace.to_frame(), f, constants, lambda lam: interval_optimal_value(1.0, lam))
        assert report.recurrence_holds
        assert report.envelope_holds
        assert len(report.recurrence_slack) == 9_999

    def test_refuses_nonconvex_objective(self):
        f = random_indefinite_quadratic(2, seed=0)
        pc2 = ProductConstraint([Box(-1.0, 1.0, dimension=2), Box(-1.0, 1.0, dimension=2)])
        result = scg_solve(f, pc2, Schedule(kind='convex', lambda0=1.0), lift([0.0, 0.0], 2), 5)
        with pytest.raises(CapabilityError):
            recurrence_check(result.trace.to_frame(), f, RateConstants.for_problem(f, pc2, 1.0), lambda lam: 0.0)


class TestGridOracle:
    @pytest.fixture(scope='class')
    def oracle(self):
        f, pc = interval_example(1.0)
        return GridOracle(f, pc)

    def test_size_and_resolution(self, oracle):
        assert oracle.size == 10001
        assert oracle.resolution == pytest.approx(4e-4)

    @pytest.mark.parametrize('lam', [0.0, 1.0, 10.0])
    def test_matches_closed_form(self, oracle, lam):
        x_star, _ = interval_analytic_minimizer(1.0, lam)
        assert_allclose(oracle.argmin(lam).data, x_star.data, atol=oracle.resolution)
        assert oracle.infimum(lam) == pytest.approx(interval_optimal_value(1.0, lam), abs=1e-6)

    def test_sandwich(self, oracle):
        f, pc = interval_example(1.0)
        for lam in (0.0, 1.0, 10.0, 1e6):
            assert sandwich_check(f, pc, lam, oracle=oracle).holds
        zero = sandwich_check(f, pc, 0.0, oracle=oracle, tol=1e-3)
        assert zero.mid == zero.rhs
        big = sandwich_check(f, pc, 1e6, oracle=oracle, tol=1e-3)
        assert abs(big.mid - big.lhs) <= 1e-3

    def test_limit_of_infima(self, oracle):
        f, pc = interval_example(1.0)
        infima = limit_of_infima(f, pc, [0.0, 1.0, 10.0, 100.0, 1e4], oracle=oracle)
        assert all(b >= a for a, b in zip(infima, infima[1:]))
        assert infima[-1] == pytest.approx(0.5, abs=1e-3)

    def test_limit_needs_increasing_parameters(self, oracle):
        f, pc = interval_example(1.0)
        with pytest.raises(ValueError):
            limit_of_infima(f, pc, [10.0, 1.0], oracle=oracle)

    def test_constant_objective(self):
        pc = ProductConstraint([Box(0.0, 1.0, dimension=1), Box(0.5, 2.0, dimension=1)])
        f = LinearObjective([0.0])
        oracle = GridOracle(f, pc, points_per_axis=101)
        assert limit_of_infima(f, pc, [0.0, 1.0, 100.0], oracle=oracle) == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)

    def test_identical_singletons(self):
        pc = ProductConstraint([Singleton([0.3, 0.4]), Singleton([0.3, 0.4])])
        f = Quadratic([0.0, 0.0])
        infima = limit_of_infima(f, pc, [0.0, 1.0, 10.0])
        assert infima == pytest.approx([0.125] * 3)

    def test_two_dimensional_blocks(self):
        pc = ProductConstraint([Simplex(2), Box(0.0, 1.0, dimension=2)])
        oracle = GridOracle(Quadratic([1.0, 1.0]), pc, points_per_axis=41)
        assert oracle.intersection_infimum() == pytest.approx(0.25, abs=1e-9)
        assert sandwich_check(Quadratic([1.0, 1.0]), pc, 2.0, oracle=oracle).holds

    def test_refuses_large_instances(self):
        pc = ProductConstraint([Box(0.0, 1.0, dimension=4)])
        with pytest.raises(InstanceTooLargeError):
            GridOracle(Quadratic(np.zeros(4)), pc)

    def test_refuses_too_many_points(self):
        pc = ProductConstraint([Box(0.0, 1.0, dimension=2), Box(0.0, 1.0, dimension=2)])
        with pytest.raises(InstanceTooLargeError):
            GridOracle(Quadratic(np.zeros(2)), pc, points_per_axis=101)
