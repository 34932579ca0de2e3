"""Checkable identities, inequalities and brute-force oracles for the split formulation.

Everything here is pure: functions return values or residuals and leave the pass/fail
decision (and its tolerance) to the caller.
"""

import itertools
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd

from split_cg.errors import CapabilityError, InstanceTooLargeError
from split_cg.models import PenaltyReport
from split_cg.objective import PenalizedObjective, Quadratic, SmoothObjective
from split_cg.sets import MEMBERSHIP_TOL, Box, ConstraintSet, ProductConstraint, Singleton, intersect_catalog
from split_cg.solver import RateConstants, fw_gap_subproblem
from split_cg.space import (
    ProductPoint,
    Weights,
    average,
    block_dots,
    dist_diag_sq,
    inner,
    lift,
    proj_diag,
)

MAX_GRID_POINTS = 10**7
MAX_GRID_DIM = 3
MAX_GRID_BLOCKS = 3
DEFAULT_POINTS_PER_AXIS = 10001


def _require_projection(pc: ProductConstraint):
    if not pc.supports_projection:
        kinds = sorted({s.kind for s in pc.sets if not s.supports_projection})
        raise CapabilityError(f'projection is not available for {", ".join(kinds)}')


def penalty_d(x: ProductPoint, pc: ProductConstraint) -> float:
    """d(x) = sum_i w_i dist^2_{C_i}(A x)."""
    _require_projection(pc)
    mean = average(x, pc.weights)
    residuals = np.array([mean - s.project(mean) for s in pc.sets])
    return float(pc.weights.omega @ block_dots(residuals, residuals))


def g_penalty(x: ProductPoint, pc: ProductConstraint) -> float:
    """g(x) = dist^2 of A x to the intersection of the sets (catalog intersections only)."""
    meet = intersect_catalog(pc.sets)
    mean = average(x, pc.weights)
    r = mean - meet.project(mean)
    return float(r @ r)


def penalty_report(x: ProductPoint, pc: ProductConstraint) -> PenaltyReport:
    """Collect the penalty-like quantities that are computable for this instance."""
    report = {'dist_sq': dist_diag_sq(x, pc.weights)}
    if pc.supports_projection:
        report['d_value'] = penalty_d(x, pc)
    try:
        meet = intersect_catalog(pc.sets)
    except CapabilityError:
        return PenaltyReport(**report)
    mean = average(x, pc.weights)
    p = meet.project(mean)
    g_value = float((mean - p) @ (mean - p))
    spread = x.data - p
    total = float(pc.weights.omega @ block_dots(spread, spread))
    report['g_value'] = g_value
    report['orthogonal_decomposition_residual'] = abs(total - g_value - report['dist_sq'])
    return PenaltyReport(**report)


def decomposition_identity(x: ProductPoint, pc: ProductConstraint) -> tuple[float, float]:
    """Residual of d(x) = dist^2_D(x) - ||x - p||^2 + 2<x - p, y - p> and the inner product.

    Here y = Proj_D x and p is the blockwise projection of y onto the product set.
    The inner product is nonpositive whenever x lies in the product set.
    """
    w = pc.weights
    y = proj_diag(x, w)
    p = pc.project(y)
    d = penalty_d(x, pc)
    x_p = x - p
    cross = inner(x_p, y - p, w)
    rhs = dist_diag_sq(x, w) - inner(x_p, x_p, w) + 2.0 * cross
    return abs(d - rhs), cross


def feasibility_equivalence(
    x: ProductPoint, pc: ProductConstraint, tol: float = MEMBERSHIP_TOL
) -> tuple[bool, bool, bool]:
    """(d(x) = 0, A x in every C_i, Proj_D x in the product set), each up to tol.

    Membership relaxes each coordinate by tol, so d(x) = 0 is read as d(x) <= n tol^2.
    """
    d_zero = penalty_d(x, pc) <= pc.dimension * tol**2
    avg_in_intersection = pc.lift_is_feasible(average(x, pc.weights), tol)
    proj_in_product = pc.contains(proj_diag(x, pc.weights), tol)
    return d_zero, avg_in_intersection, proj_in_product


def diagonal_decomposition_check(point: np.ndarray, pc: ProductConstraint) -> tuple[bool, bool]:
    """(A* x in the product set, x in the intersection); the two must agree."""
    lifted = pc.contains(lift(point, pc.m))
    try:
        in_meet = intersect_catalog(pc.sets).contains(point)
    except CapabilityError:
        in_meet = pc.lift_is_feasible(point)
    return lifted, in_meet


def finite_difference_gradient(func: Callable[[ProductPoint], float], x: ProductPoint, h: float = 1e-5) -> ProductPoint:
    """Central-difference gradient of func with respect to the plain sum of block inner products."""
    base = x.data
    grad = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        step = np.zeros_like(base)
        step[idx] = h
        grad[idx] = (func(ProductPoint.from_array(base + step)) - func(ProductPoint.from_array(base - step))) / (2 * h)
    return ProductPoint.from_array(grad)


def gbound_check(x: ProductPoint, y: ProductPoint, pc: ProductConstraint, slack: float = 1e-9) -> bool:
    """dist^2_D(x) <= R and ||x - y||^2 <= R for feasible x, y."""
    w = pc.weights
    R = pc.R
    diff = x - y
    return dist_diag_sq(x, w) <= R + slack and inner(diff, diff, w) <= R + slack


class GapBound(NamedTuple):
    holds: bool
    subproblem_gap: float
    inner_gap: float
    lower_bound: float


def gap_bound_check(
    x: ProductPoint,
    objective: SmoothObjective,
    pc: ProductConstraint,
    lam: float,
    beta_f: Optional[float] = None,
    slack: float = 1e-9,
) -> GapBound:
    """Subproblem gap >= intersection gap at A x + lam dist^2_D(x) >= -beta_f R_A."""
    meet = intersect_catalog(pc.sets)
    if beta_f is None:
        beta_f = objective.gradient_bound(pc.minkowski_radius)
    F = PenalizedObjective(base=objective, lam=lam, weights=pc.weights)
    sub_gap, _ = fw_gap_subproblem(F, pc, x)
    mean = average(x, pc.weights)
    grad = objective.gradient(mean)
    inner_gap = float(grad @ (mean - meet.lmo(grad)))
    middle = inner_gap + lam * dist_diag_sq(x, pc.weights)
    lower = -beta_f * pc.R_A
    holds = sub_gap >= middle - slack and middle >= lower - slack
    return GapBound(holds, sub_gap, inner_gap, lower)


# interval instance: f = x^2/2, C_1 = {z}, C_2 = [-2, 2], equal weights


def interval_example(z: float = 1.0) -> tuple[Quadratic, ProductConstraint]:
    if not 0 <= z <= 2:
        raise ValueError(f'z must lie in [0, 2], got {z}')
    pc = ProductConstraint([Singleton([z]), Box(-2.0, 2.0, dimension=1)], Weights([0.5, 0.5]))
    return Quadratic([0.0]), pc


def interval_analytic_minimizer(z: float, lam: float) -> tuple[ProductPoint, float]:
    """Unique minimizer of F_lam on the interval instance and its average lam z/(1 + lam)."""
    if z < 0 or lam < 0:
        raise ValueError('interval minimizer needs z >= 0 and lam >= 0')
    free_block = (lam - 1.0) * z / (1.0 + lam)
    return ProductPoint([[z], [free_block]]), lam * z / (1.0 + lam)


def interval_optimal_value(z: float, lam: float) -> float:
    """min F_lam = lam z^2 / (2 (1 + lam))."""
    return lam * z * z / (2.0 * (1.0 + lam))


def regularization_path(z: float, lambdas: Sequence[float]) -> pd.DataFrame:
    """f(A x*_lam) and dist^2_D(x*_lam) along lam on the interval instance."""
    f = Quadratic([0.0])
    w = Weights([0.5, 0.5])
    rows = []
    for lam in lambdas:
        x_star, mean = interval_analytic_minimizer(z, lam)
        rows.append({'lambda': lam, 'average': mean, 'f_value': f.value(np.array([mean])),
                     'dist_sq': dist_diag_sq(x_star, w)})
    return pd.DataFrame(rows, columns=['lambda', 'average', 'f_value', 'dist_sq'])


class RecurrenceReport(NamedTuple):
    primal_gap: np.ndarray
    recurrence_slack: np.ndarray
    envelope_slack: np.ndarray

    @property
    def recurrence_holds(self) -> bool:
        return bool(np.all(self.recurrence_slack >= -1e-9))

    @property
    def envelope_holds(self) -> bool:
        return bool(np.all(self.envelope_slack >= -1e-9))


def recurrence_check(
    trace: pd.DataFrame,
    objective: SmoothObjective,
    constants: RateConstants,
    optimal_value: Callable[[float], float],
) -> RecurrenceReport:
    """Replay a convex-schedule trace against the one-step recurrence and the envelope column.

    H_t = F_value_t - optimal_value(lambda_t) must satisfy
    H_{t+1} <= (1 - g_t) H_t + (l_{t+1} - l_t) R/2 + g_t^2 (l_t + L) R/2 and H_t <= envelope_t.
    """
    if not objective.is_convex:
        raise CapabilityError('the primal-gap recurrence needs a convex objective')
    lam = trace['lambda'].to_numpy(dtype=float)
    gamma = trace['gamma'].to_numpy(dtype=float)
    optimum = np.array([optimal_value(v) for v in lam])
    gap = trace['F_value'].to_numpy(dtype=float) - optimum
    R, L = constants.R, constants.lipschitz
    bound = (
        (1.0 - gamma[:-1]) * gap[:-1]
        + (lam[1:] - lam[:-1]) * R / 2.0
        + gamma[:-1] ** 2 * (lam[:-1] + L) * R / 2.0
    )
    recurrence_slack = bound - gap[1:]
    envelope_slack = trace['rate_envelope'].to_numpy(dtype=float) - gap
    return RecurrenceReport(gap, recurrence_slack, envelope_slack)


class GridOracle:
    """Brute-force infima over uniform grids of tiny instances.

    Each set is replaced by the grid points of its bounding box that pass its membership
    test; the product grid is enumerated in chunks over the first block. Objective and
    diagonal-distance values are computed once, so infima for several penalty parameters
    are mutually consistent.
    """

    def __init__(
        self,
        objective: SmoothObjective,
        pc: ProductConstraint,
        points_per_axis: int = DEFAULT_POINTS_PER_AXIS,
        max_points: int = MAX_GRID_POINTS,
    ):
        if pc.dimension > MAX_GRID_DIM or pc.m > MAX_GRID_BLOCKS:
            raise InstanceTooLargeError(
                f'grid oracle handles n <= {MAX_GRID_DIM} and m <= {MAX_GRID_BLOCKS}, got n={pc.dimension}, m={pc.m}'
            )
        if points_per_axis < 2:
            raise ValueError('points_per_axis must be at least 2')
        self.objective = objective
        self.pc = pc
        self.points_per_axis = points_per_axis
        self.max_points = max_points
        self.resolution = 0.0
        self.grids = [self._set_grid(s) for s in pc.sets]
        total = int(np.prod([len(g) for g in self.grids], dtype=float))
        if total > max_points:
            raise InstanceTooLargeError(f'product grid has {total} points, limit is {max_points}')
        self._f_values, self._dist_sq = self._evaluate()

    def _axes(self, lower: np.ndarray, upper: np.ndarray) -> list[np.ndarray]:
        axes = []
        for lo, hi in zip(lower, upper):
            if hi - lo <= 0.0:
                axes.append(np.array([lo]))
            else:
                axes.append(np.linspace(lo, hi, self.points_per_axis))
                self.resolution = max(self.resolution, (hi - lo) / (self.points_per_axis - 1))
        return axes

    def _box_grid(self, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
        axes = self._axes(lower, upper)
        size = int(np.prod([len(a) for a in axes], dtype=float))
        if size > self.max_points:
            raise InstanceTooLargeError(f'set grid has {size} points, limit is {self.max_points}')
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=1)

    def _set_grid(self, cset: ConstraintSet) -> np.ndarray:
        points = self._box_grid(*cset.bounds())
        points = points[cset.contains_rows(points)]
        if len(points) == 0:
            raise InstanceTooLargeError(f'grid is too coarse to contain a point of {cset!r}')
        return points

    def _evaluate(self) -> tuple[np.ndarray, np.ndarray]:
        w = self.pc.weights.omega
        rest = self.grids[1:]
        if not rest:
            return self.objective.values(self.grids[0]), np.zeros(len(self.grids[0]))
        index = np.array(list(itertools.product(*[range(len(g)) for g in rest])), dtype=np.int64)
        rest_blocks = [g[index[:, k]] for k, g in enumerate(rest)]
        f_parts, d_parts = [], []
        for head in self.grids[0]:
            stacked = np.stack([np.broadcast_to(head, rest_blocks[0].shape)] + rest_blocks)
            mean = np.einsum('i,ikn->kn', w, stacked)
            spread = stacked - mean
            dist_sq = np.einsum('i,ikn,ikn->k', w, spread, spread)
            f_parts.append(self.objective.values(mean))
            d_parts.append(dist_sq)
        return np.concatenate(f_parts), np.concatenate(d_parts)

    @property
    def size(self) -> int:
        return self._f_values.shape[0]

    def penalized_values(self, lam: float) -> np.ndarray:
        return self._f_values + 0.5 * lam * self._dist_sq

    def infimum(self, lam: float) -> float:
        """Grid infimum of F_lam over the product set."""
        return float(self.penalized_values(lam).min())

    def argmin(self, lam: float) -> ProductPoint:
        k = int(np.argmin(self.penalized_values(lam)))
        rest_sizes = [len(g) for g in self.grids[1:]]
        per_head = int(np.prod(rest_sizes, dtype=float)) if rest_sizes else 1
        head, offset = divmod(k, per_head)
        blocks = [self.grids[0][head]]
        if rest_sizes:
            for g, i in zip(self.grids[1:], np.unravel_index(offset, rest_sizes)):
                blocks.append(g[i])
        return ProductPoint(blocks)

    def minkowski_infimum(self) -> float:
        """Grid infimum of f over the weighted Minkowski sum."""
        return float(self._f_values.min())

    def intersection_infimum(self) -> float:
        """Grid infimum of f over the intersection of the sets."""
        bounds = [s.bounds() for s in self.pc.sets]
        lower = np.max([b[0] for b in bounds], axis=0)
        upper = np.min([b[1] for b in bounds], axis=0)
        if np.any(lower > upper):
            raise CapabilityError('the intersection is empty')
        points = self._box_grid(lower, upper)
        mask = np.ones(len(points), dtype=bool)
        for s in self.pc.sets:
            mask &= s.contains_rows(points)
        if not mask.any():
            raise CapabilityError('no grid point lies in the intersection')
        return float(self.objective.values(points[mask]).min())

    def tolerance(self, lam: float) -> float:
        """resolution * (beta_f + lam * diameter)."""
        radius = max(s.max_norm for s in self.pc.sets)
        diameter = float(self.pc.diameters.max())
        return self.resolution * (self.objective.gradient_bound(radius) + lam * diameter)


class Sandwich(NamedTuple):
    lhs: float
    mid: float
    rhs: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.mid - self.tol and self.mid >= self.rhs - self.tol


def sandwich_check(
    objective: SmoothObjective,
    pc: ProductConstraint,
    lam: float,
    oracle: Optional[GridOracle] = None,
    tol: Optional[float] = None,
) -> Sandwich:
    """inf over the intersection >= inf F_lam >= inf over the Minkowski sum, on a grid."""
    oracle = oracle or GridOracle(objective, pc)
    return Sandwich(
        lhs=oracle.intersection_infimum(),
        mid=oracle.infimum(lam),
        rhs=oracle.minkowski_infimum(),
        tol=oracle.tolerance(lam) if tol is None else tol,
    )


def limit_of_infima(
    objective: SmoothObjective,
    pc: ProductConstraint,
    lambdas: Sequence[float],
    oracle: Optional[GridOracle] = None,
) -> list[float]:
    """Grid infima of F_lam along an increasing sequence of penalty parameters."""
    if any(b < a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError('penalty parameters must be nondecreasing')
    oracle = oracle or GridOracle(objective, pc)
    return [oracle.infimum(lam) for lam in lambdas]
