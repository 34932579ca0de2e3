"""Catalog of compact convex sets accessed through linear minimization oracles.

Matrix-valued sets (nuclear-norm ball, spectrahedron, Birkhoff polytope) act on the
row-major flattening of their matrices and carry the shape as metadata.
"""

import itertools
import math
from abc import ABC, abstractmethod
from concurrent.futures import Executor
from typing import ClassVar, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from split_cg.errors import CapabilityError, DimensionMismatchError
from split_cg.linalg import min_eigenvector, top_singular_pair
from split_cg.space import ArrayLike, ProductPoint, Weights, as_point

MEMBERSHIP_TOL = 1e-9
MAX_BOX_VERTEX_DIM = 16
MAX_BIRKHOFF_VERTEX_N = 6

Seed = Union[int, Sequence[int], None]


class ConstraintSet(ABC):
    """Nonempty compact convex subset of R^n with a linear minimization oracle."""

    kind: ClassVar[str] = ''

    def __init__(self, dimension: int):
        if dimension < 1:
            raise DimensionMismatchError(f'{self.kind} needs dimension >= 1, got {dimension}')
        self._dimension = int(dimension)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    @abstractmethod
    def diameter(self) -> float:
        """Analytic upper bound on sup ||a - b|| over the set."""

    @property
    @abstractmethod
    def max_norm(self) -> float:
        """Analytic upper bound on sup ||a|| over the set."""

    def lmo(self, c: ArrayLike) -> np.ndarray:
        """Return a minimizer of <c, z> over the set; ties broken towards the smallest index."""
        return self._lmo(as_point(c, self._dimension))

    @abstractmethod
    def _lmo(self, c: np.ndarray) -> np.ndarray:
        pass

    def contains(self, x: ArrayLike, tol: float = MEMBERSHIP_TOL) -> bool:
        """Membership with every defining inequality relaxed by tol."""
        return self._contains(as_point(x, self._dimension), tol)

    @abstractmethod
    def _contains(self, x: np.ndarray, tol: float) -> bool:
        pass

    def contains_rows(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        """Membership mask for every row of a (k, n) array."""
        return np.array([self._contains(row, tol) for row in points], dtype=bool)

    def project(self, x: ArrayLike) -> np.ndarray:
        """Euclidean projection onto the set, where a cheap one exists."""
        raise CapabilityError(f'projection onto {self.kind} is not available')

    def random_feasible(self, seed: Seed = None) -> np.ndarray:
        """Deterministic feasible sample for a given seed."""
        return self._sample(np.random.default_rng(seed))

    @abstractmethod
    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        pass

    @abstractmethod
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned bounding box (lower, upper)."""

    def vertices(self) -> np.ndarray:
        """All extreme points as rows, for polytopes small enough to enumerate."""
        raise CapabilityError(f'vertex enumeration is not available for {self.kind}')

    @property
    def supports_projection(self) -> bool:
        """True when the subclass overrides project."""
        return type(self).project is not ConstraintSet.project

    def __repr__(self) -> str:
        return f'{type(self).__name__}(dimension={self._dimension})'


class Singleton(ConstraintSet):
    kind = 'singleton'

    def __init__(self, point: ArrayLike):
        z = as_point(point).copy()
        super().__init__(z.shape[0])
        z.setflags(write=False)
        self.point = z

    @property
    def diameter(self) -> float:
        return 0.0

    @property
    def max_norm(self) -> float:
        return float(np.linalg.norm(self.point))

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        return self.point.copy()

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.all(np.abs(x - self.point) <= tol))

    def contains_rows(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.all(np.abs(points - self.point) <= tol, axis=1)

    def project(self, x: ArrayLike) -> np.ndarray:
        as_point(x, self._dimension)
        return self.point.copy()

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.point.copy()

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.point.copy(), self.point.copy()

    def vertices(self) -> np.ndarray:
        return self.point.reshape(1, -1).copy()

    def __repr__(self) -> str:
        return f'Singleton({self.point.tolist()})'


class Box(ConstraintSet):
    """Axis-aligned box [l, u]; scalar bounds broadcast to the given dimension."""

    kind = 'box'

    def __init__(self, lower: ArrayLike, upper: ArrayLike, dimension: Optional[int] = None):
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        if dimension is None:
            dimension = max(lo.shape[0], hi.shape[0])
        try:
            lo = np.broadcast_to(lo, (dimension,)).copy()
            hi = np.broadcast_to(hi, (dimension,)).copy()
        except ValueError as e:
            raise DimensionMismatchError(f'box bounds do not match dimension {dimension}') from e
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError('box bounds must be finite')
        if np.any(lo > hi):
            raise ValueError(f'box needs lower <= upper, got {lo.tolist()} and {hi.tolist()}')
        super().__init__(dimension)
        lo.setflags(write=False)
        hi.setflags(write=False)
        self.lower = lo
        self.upper = hi

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def max_norm(self) -> float:
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        return np.where(c >= 0.0, self.lower, self.upper)

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def contains_rows(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.all((points >= self.lower - tol) & (points <= self.upper + tol), axis=1)

    def project(self, x: ArrayLike) -> np.ndarray:
        return np.clip(as_point(x, self._dimension), self.lower, self.upper)

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower.copy(), self.upper.copy()

    def vertices(self) -> np.ndarray:
        if self._dimension > MAX_BOX_VERTEX_DIM:
            raise CapabilityError(f'box of dimension {self._dimension} has too many vertices to enumerate')
        axes = [sorted({lo, hi}) for lo, hi in zip(self.lower.tolist(), self.upper.tolist())]
        return np.array(list(itertools.product(*axes)), dtype=float)

    def __repr__(self) -> str:
        return f'Box({self.lower.tolist()}, {self.upper.tolist()})'


class L1Ball(ConstraintSet):
    kind = 'l1_ball'

    def __init__(self, radius: float, dimension: Optional[int] = None, center: Optional[ArrayLike] = None):
        if radius < 0 or not math.isfinite(radius):
            raise ValueError(f'radius must be finite and nonnegative, got {radius}')
        if dimension is None and center is None:
            raise DimensionMismatchError('either dimension or center is required')
        a = np.zeros(dimension) if center is None else as_point(center, dimension).copy()
        super().__init__(a.shape[0])
        a.setflags(write=False)
        self.radius = float(radius)
        self.center = a

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def max_norm(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        k = int(np.argmax(np.abs(c)))
        sign = -1.0 if c[k] < 0 else 1.0
        v = self.center.copy()
        v[k] -= self.radius * sign
        return v

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.sum(np.abs(x - self.center)) <= self.radius + tol)

    def contains_rows(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.sum(np.abs(points - self.center), axis=1) <= self.radius + tol

    def project(self, x: ArrayLike) -> np.ndarray:
        y = as_point(x, self._dimension) - self.center
        if np.sum(np.abs(y)) <= self.radius:
            return y + self.center
        if self.radius == 0.0:
            return self.center.copy()
        theta = _simplex_threshold(np.abs(y), self.radius)
        return self.center + np.sign(y) * np.maximum(np.abs(y) - theta, 0.0)

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        n = self._dimension
        mass = rng.dirichlet(np.ones(n + 1))[:n]
        signs = rng.choice([-1.0, 1.0], size=n)
        return self.center + self.radius * signs * mass

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    def vertices(self) -> np.ndarray:
        eye = self.radius * np.eye(self._dimension)
        return np.vstack([self.center + eye, self.center - eye])

    def __repr__(self) -> str:
        return f'L1Ball(radius={self.radius}, center={self.center.tolist()})'


class Simplex(ConstraintSet):
    """Unit simplex {x >= 0, sum x = 1}."""

    kind = 'simplex'

    @property
    def diameter(self) -> float:
        return math.sqrt(2.0) if self._dimension > 1 else 0.0

    @property
    def max_norm(self) -> float:
        return 1.0

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        v = np.zeros(self._dimension)
        v[int(np.argmin(c))] = 1.0
        return v

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)

    def contains_rows(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.all(points >= -tol, axis=1) & (np.abs(points.sum(axis=1) - 1.0) <= tol)

    def project(self, x: ArrayLike) -> np.ndarray:
        y = as_point(x, self._dimension)
        return np.maximum(y - _simplex_threshold(y, 1.0), 0.0)

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.dirichlet(np.ones(self._dimension))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros(self._dimension), np.ones(self._dimension)

    def vertices(self) -> np.ndarray:
        return np.eye(self._dimension)


class EuclideanBall(ConstraintSet):
    kind = 'euclidean_ball'

    def __init__(self, radius: float, dimension: Optional[int] = None, center: Optional[ArrayLike] = None):
        if radius < 0 or not math.isfinite(radius):
            raise ValueError(f'radius must be finite and nonnegative, got {radius}')
        if dimension is None and center is None:
            raise DimensionMismatchError('either dimension or center is required')
        a = np.zeros(dimension) if center is None else as_point(center, dimension).copy()
        super().__init__(a.shape[0])
        a.setflags(write=False)
        self.radius = float(radius)
        self.center = a

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def max_norm(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        c_norm = np.linalg.norm(c)
        if c_norm == 0.0:
            v = self.center.copy()
            v[0] += self.radius
            return v
        return self.center - self.radius * c / c_norm

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def contains_rows(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.linalg.norm(points - self.center, axis=1) <= self.radius + tol

    def project(self, x: ArrayLike) -> np.ndarray:
        y = as_point(x, self._dimension) - self.center
        y_norm = np.linalg.norm(y)
        if y_norm <= self.radius:
            return y + self.center
        return self.center + (self.radius / y_norm) * y

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        direction = rng.standard_normal(self._dimension)
        direction /= np.linalg.norm(direction)
        scale = self.radius * rng.uniform() ** (1.0 / self._dimension)
        return self.center + scale * direction

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    def __repr__(self) -> str:
        return f'EuclideanBall(radius={self.radius}, center={self.center.tolist()})'


class NuclearBall(ConstraintSet):
    """Nuclear-norm ball of radius tau over rows x cols matrices."""

    kind = 'nuclear_ball'

    def __init__(self, radius: float, rows: int, cols: int):
        if radius < 0 or not math.isfinite(radius):
            raise ValueError(f'radius must be finite and nonnegative, got {radius}')
        super().__init__(rows * cols)
        self.radius = float(radius)
        self.rows = int(rows)
        self.cols = int(cols)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def max_norm(self) -> float:
        # Frobenius norm is bounded by the nuclear norm
        return self.radius

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        u, _, v = top_singular_pair(c.reshape(self.rows, self.cols))
        return (-self.radius * np.outer(u, v)).ravel()

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.linalg.norm(x.reshape(self.rows, self.cols), 'nuc') <= self.radius + tol)

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        g = rng.standard_normal((self.rows, self.cols))
        g *= self.radius * rng.uniform() / np.linalg.norm(g, 'nuc')
        return g.ravel()

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        # every entry is bounded by the top singular value
        return np.full(self._dimension, -self.radius), np.full(self._dimension, self.radius)

    def __repr__(self) -> str:
        return f'NuclearBall(radius={self.radius}, shape=({self.rows}, {self.cols}))'


class Spectrahedron(ConstraintSet):
    """Positive semidefinite size x size matrices with unit trace."""

    kind = 'spectrahedron'

    def __init__(self, size: int):
        super().__init__(size * size)
        self.size = int(size)

    @property
    def diameter(self) -> float:
        return math.sqrt(2.0)

    @property
    def max_norm(self) -> float:
        return 1.0

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        mat = c.reshape(self.size, self.size)
        sym = 0.5 * (mat + mat.T)
        v = min_eigenvector(sym, float(np.linalg.norm(mat)), max_iters=500 * self.size)
        return np.outer(v, v).ravel()

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        mat = x.reshape(self.size, self.size)
        if np.max(np.abs(mat - mat.T)) > tol or abs(np.trace(mat) - 1.0) > tol:
            return False
        return bool(np.linalg.eigvalsh(0.5 * (mat + mat.T)).min() >= -tol)

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        g = rng.standard_normal((self.size, self.size))
        mat = g @ g.T
        return (mat / np.trace(mat)).ravel()

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.size)
        lower = np.where(eye == 1.0, 0.0, -0.5)
        upper = np.where(eye == 1.0, 1.0, 0.5)
        return lower.ravel(), upper.ravel()

    def __repr__(self) -> str:
        return f'Spectrahedron(size={self.size})'


class Birkhoff(ConstraintSet):
    """Doubly stochastic n x n matrices; vertices are the permutation matrices."""

    kind = 'birkhoff'

    def __init__(self, n: int):
        super().__init__(n * n)
        self.n = int(n)

    @property
    def diameter(self) -> float:
        return math.sqrt(2.0 * self.n)

    @property
    def max_norm(self) -> float:
        return math.sqrt(self.n)

    def _lmo(self, c: np.ndarray) -> np.ndarray:
        rows, cols = linear_sum_assignment(c.reshape(self.n, self.n))
        perm = np.zeros((self.n, self.n))
        perm[rows, cols] = 1.0
        return perm.ravel()

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        mat = x.reshape(self.n, self.n)
        return bool(
            np.all(mat >= -tol)
            and np.all(np.abs(mat.sum(axis=0) - 1.0) <= tol)
            and np.all(np.abs(mat.sum(axis=1) - 1.0) <= tol)
        )

    def _sample(self, rng: np.random.Generator) -> np.ndarray:
        mix = rng.dirichlet(np.ones(self.n))
        mat = np.zeros((self.n, self.n))
        eye = np.eye(self.n)
        for weight in mix:
            mat += weight * eye[rng.permutation(self.n)]
        return mat.ravel()

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros(self._dimension), np.ones(self._dimension)

    def vertices(self) -> np.ndarray:
        if self.n > MAX_BIRKHOFF_VERTEX_N:
            raise CapabilityError(f'Birkhoff polytope of order {self.n} has too many vertices to enumerate')
        eye = np.eye(self.n)
        return np.array([eye[list(p)].ravel() for p in itertools.permutations(range(self.n))])

    def __repr__(self) -> str:
        return f'Birkhoff(n={self.n})'


def _simplex_threshold(y: np.ndarray, total: float) -> float:
    """Shift theta with sum(max(y - theta, 0)) = total (sort-based)."""
    y_desc = np.sort(y)[::-1]
    cumsum = np.cumsum(y_desc)
    idx = np.arange(1, y.shape[0] + 1)
    theta = (cumsum - total) / idx
    rho = int(np.nonzero(y_desc - theta > 0)[0][-1])
    return float(theta[rho])


class ProductConstraint:
    """Product C_1 x ... x C_m with convex weights on the blocks."""

    def __init__(self, sets: Sequence[ConstraintSet], weights: Optional[Weights] = None):
        sets = list(sets)
        if not sets:
            raise DimensionMismatchError('a product constraint needs at least one set')
        dims = {s.dimension for s in sets}
        if len(dims) != 1:
            raise DimensionMismatchError(f'all sets must share one dimension, got {sorted(dims)}')
        if weights is None:
            weights = Weights.uniform(len(sets))
        if len(weights) != len(sets):
            raise DimensionMismatchError(f'{len(weights)} weights for {len(sets)} sets')
        self.sets = tuple(sets)
        self.weights = weights

    @property
    def m(self) -> int:
        return len(self.sets)

    @property
    def dimension(self) -> int:
        return self.sets[0].dimension

    @property
    def diameters(self) -> np.ndarray:
        return np.array([s.diameter for s in self.sets])

    @property
    def R(self) -> float:
        """sum_i w_i R_i^2."""
        return float(self.weights.omega @ self.diameters**2)

    @property
    def R_A(self) -> float:
        """sum_i w_i R_i."""
        return float(self.weights.omega @ self.diameters)

    @property
    def minkowski_radius(self) -> float:
        """Bound on ||c|| over the weighted Minkowski sum sum_i w_i C_i."""
        return float(self.weights.omega @ np.array([s.max_norm for s in self.sets]))

    def lmo_blocks(self, directions: np.ndarray, executor: Optional[Executor] = None) -> np.ndarray:
        """Blockwise LMO on an (m, n) array of directions."""
        if directions.shape != (self.m, self.dimension):
            raise DimensionMismatchError(f'directions of shape {directions.shape}, expected {(self.m, self.dimension)}')
        if executor is None:
            return np.array([s.lmo(d) for s, d in zip(self.sets, directions)])
        return np.array(list(executor.map(lambda pair: pair[0].lmo(pair[1]), zip(self.sets, directions))))

    def lmo(self, c: ProductPoint, executor: Optional[Executor] = None) -> ProductPoint:
        """Minimizer of the weighted inner product with c over the product set."""
        return ProductPoint.from_array(self.lmo_blocks(c.data, executor))

    def contains(self, x: ProductPoint, tol: float = MEMBERSHIP_TOL) -> bool:
        """True when every block lies in its own set."""
        self._check(x)
        return all(s.contains(block, tol) for s, block in zip(self.sets, x.data))

    def project(self, x: ProductPoint) -> ProductPoint:
        """Blockwise projection; raises CapabilityError if some set has none."""
        self._check(x)
        return ProductPoint.from_array(np.array([s.project(block) for s, block in zip(self.sets, x.data)]))

    def random_feasible(self, seed: int = 0) -> ProductPoint:
        """Blockwise feasible point, block i drawn from the seed pair (seed, i)."""
        return ProductPoint.from_array(np.array([s.random_feasible([seed, i]) for i, s in enumerate(self.sets)]))

    def lift_is_feasible(self, x: ArrayLike, tol: float = MEMBERSHIP_TOL) -> bool:
        """True iff x lies in every C_i, that is A* x lies in the product."""
        point = as_point(x, self.dimension)
        return all(s.contains(point, tol) for s in self.sets)

    @property
    def supports_projection(self) -> bool:
        """True when every set can project."""
        return all(s.supports_projection for s in self.sets)

    def _check(self, x: ProductPoint):
        if x.m != self.m or x.n != self.dimension:
            raise DimensionMismatchError(f'point of shape {(x.m, x.n)}, expected {(self.m, self.dimension)}')

    def __repr__(self) -> str:
        return f'ProductConstraint({list(self.sets)!r}, {self.weights!r})'


def lmo_product(pc: ProductConstraint, c: ProductPoint, executor: Optional[Executor] = None) -> ProductPoint:
    """LMO of the product set, applied block by block."""
    return pc.lmo(c, executor)


def intersect_catalog(sets: Sequence[ConstraintSet]) -> ConstraintSet:
    """Return the intersection of boxes and singletons as a catalog set.

    Raises CapabilityError when some set is of another kind or the intersection is empty.
    """
    sets = list(sets)
    if not sets or any(not isinstance(s, (Box, Singleton)) for s in sets):
        raise CapabilityError('intersection is only available for boxes and singletons')
    if len({s.dimension for s in sets}) != 1:
        raise DimensionMismatchError('sets must share one dimension')
    bounds = [s.bounds() for s in sets]
    lower = np.max([b[0] for b in bounds], axis=0)
    upper = np.min([b[1] for b in bounds], axis=0)
    if np.any(lower > upper + MEMBERSHIP_TOL):
        raise CapabilityError('intersection is empty')
    points = [s.point for s in sets if isinstance(s, Singleton)]
    if points:
        z = points[0]
        if not all(s.contains(z) for s in sets):
            raise CapabilityError('intersection is empty')
        return Singleton(z)
    if np.array_equal(lower, upper):
        return Singleton(lower)
    return Box(lower, np.maximum(lower, upper))


SET_KINDS: dict[str, type[ConstraintSet]] = {
    cls.kind: cls for cls in (Singleton, Box, L1Ball, Simplex, EuclideanBall, NuclearBall, Spectrahedron, Birkhoff)
}
