"""Smooth objectives and the penalized product-space objective."""

from abc import ABC, abstractmethod

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from split_cg.errors import DimensionMismatchError
from split_cg.linalg import top_eigenpair_psd
from split_cg.space import ArrayLike, ProductPoint, Weights, as_point, average, block_dots, dist_diag_sq


class SmoothObjective(ABC):
    """f: R^n -> R with an L-Lipschitz gradient."""

    kind: str = ''

    def __init__(self, dimension: int):
        self._dimension = int(dimension)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    @abstractmethod
    def lipschitz(self) -> float:
        pass

    @property
    def is_convex(self) -> bool:
        return True

    @abstractmethod
    def value(self, x: np.ndarray) -> float:
        pass

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray:
        pass

    def values(self, points: np.ndarray) -> np.ndarray:
        """Objective on every row of a (k, n) array."""
        return np.array([self.value(row) for row in points])

    @abstractmethod
    def gradient_bound(self, radius: float) -> float:
        """Upper bound on ||grad f(x)|| over the ball ||x|| <= radius."""


class Quadratic(SmoothObjective):
    """f(x) = 1/2 ||x - b||^2."""

    kind = 'quadratic'

    def __init__(self, center: ArrayLike):
        b = as_point(center).copy()
        super().__init__(b.shape[0])
        b.setflags(write=False)
        self.center = b

    @property
    def lipschitz(self) -> float:
        return 1.0

    def value(self, x: np.ndarray) -> float:
        d = x - self.center
        return 0.5 * float(d @ d)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return x - self.center

    def values(self, points: np.ndarray) -> np.ndarray:
        d = points - self.center
        return 0.5 * np.einsum('ij,ij->i', d, d)

    def gradient_bound(self, radius: float) -> float:
        return radius + float(np.linalg.norm(self.center))


class LeastSquares(SmoothObjective):
    """f(x) = 1/2 ||M x - b||^2."""

    kind = 'least_squares'

    def __init__(self, matrix: np.ndarray, rhs: ArrayLike):
        mat = np.array(matrix, dtype=float)
        b = as_point(rhs)
        if mat.ndim != 2 or mat.shape[0] != b.shape[0]:
            raise DimensionMismatchError(f'matrix {mat.shape} does not match rhs of length {b.shape[0]}')
        super().__init__(mat.shape[1])
        self.matrix = mat
        self.rhs = b
        self._lipschitz, _ = top_eigenpair_psd(mat.T @ mat)

    @property
    def lipschitz(self) -> float:
        return self._lipschitz

    def value(self, x: np.ndarray) -> float:
        r = self.matrix @ x - self.rhs
        return 0.5 * float(r @ r)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.matrix.T @ (self.matrix @ x - self.rhs)

    def values(self, points: np.ndarray) -> np.ndarray:
        r = points @ self.matrix.T - self.rhs
        return 0.5 * np.einsum('ij,ij->i', r, r)

    def gradient_bound(self, radius: float) -> float:
        return self._lipschitz * radius + float(np.linalg.norm(self.matrix.T @ self.rhs))


class IndefiniteQuadratic(SmoothObjective):
    """f(x) = 1/2 x^T Q x + q^T x with Q symmetric, possibly indefinite."""

    kind = 'indefinite_quadratic'

    def __init__(self, matrix: np.ndarray, linear: ArrayLike):
        q_mat = np.array(matrix, dtype=float)
        q = as_point(linear)
        if q_mat.shape != (q.shape[0], q.shape[0]):
            raise DimensionMismatchError(f'matrix {q_mat.shape} does not match linear term of length {q.shape[0]}')
        if not np.allclose(q_mat, q_mat.T, rtol=0.0, atol=1e-12):
            raise ValueError('quadratic term must be symmetric')
        super().__init__(q.shape[0])
        self.matrix = 0.5 * (q_mat + q_mat.T)
        self.linear = q
        eigs = np.linalg.eigvalsh(self.matrix)
        self._lipschitz = float(np.max(np.abs(eigs)))
        self._min_eig = float(eigs[0])

    @property
    def lipschitz(self) -> float:
        return self._lipschitz

    @property
    def is_convex(self) -> bool:
        return self._min_eig >= 0.0

    def value(self, x: np.ndarray) -> float:
        return 0.5 * float(x @ self.matrix @ x) + float(self.linear @ x)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x + self.linear

    def values(self, points: np.ndarray) -> np.ndarray:
        return 0.5 * np.einsum('ij,ij->i', points @ self.matrix, points) + points @ self.linear

    def gradient_bound(self, radius: float) -> float:
        return self._lipschitz * radius + float(np.linalg.norm(self.linear))


class LinearObjective(SmoothObjective):
    """f(x) = <c, x>; L = 0."""

    kind = 'linear'

    def __init__(self, coefficients: ArrayLike):
        c = as_point(coefficients).copy()
        super().__init__(c.shape[0])
        c.setflags(write=False)
        self.coefficients = c

    @property
    def lipschitz(self) -> float:
        return 0.0

    def value(self, x: np.ndarray) -> float:
        return float(self.coefficients @ x)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.coefficients.copy()

    def values(self, points: np.ndarray) -> np.ndarray:
        return points @ self.coefficients

    def gradient_bound(self, radius: float) -> float:
        return float(np.linalg.norm(self.coefficients))


def random_indefinite_quadratic(n: int, seed: int = 0, linear_scale: float = 0.5) -> IndefiniteQuadratic:
    """Seeded indefinite quadratic with spectrum in [-1, 1] containing both endpoints."""
    if n < 2:
        raise DimensionMismatchError('an indefinite quadratic needs n >= 2')
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = rng.uniform(-1.0, 1.0, size=n)
    eigs[0], eigs[1] = -1.0, 1.0
    q_mat = (basis * eigs) @ basis.T
    q_mat = 0.5 * (q_mat + q_mat.T)
    return IndefiniteQuadratic(q_mat, linear_scale * rng.standard_normal(n))


class PenalizedObjective(BaseModel):
    """F_lambda(x) = f(A x) + lambda/2 dist^2_D(x) on the weighted product space."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, allow_inf_nan=False)

    base: SmoothObjective
    lam: float = Field(..., ge=0, description='Penalty parameter')
    weights: Weights

    @property
    def smoothness(self) -> float:
        return self.base.lipschitz + self.lam

    def value(self, x: ProductPoint) -> float:
        return penalized_eval(self, x)

    def gradient(self, x: ProductPoint) -> ProductPoint:
        return penalized_grad(self, x)

    def with_lambda(self, lam: float) -> 'PenalizedObjective':
        return PenalizedObjective(base=self.base, lam=lam, weights=self.weights)


def penalized_eval(F: PenalizedObjective, x: ProductPoint) -> float:
    return F.base.value(average(x, F.weights)) + 0.5 * F.lam * dist_diag_sq(x, F.weights)


def penalized_grad(F: PenalizedObjective, x: ProductPoint) -> ProductPoint:
    """Block i is grad f(A x) + lambda (x^i - A x), in the weighted metric."""
    mean = average(x, F.weights)
    return ProductPoint.from_array(F.base.gradient(mean) + F.lam * (x.data - mean))


def shifted_identity(F: PenalizedObjective, delta: float, x: ProductPoint) -> tuple[float, float]:
    """Both sides of F_lam(x) = F_{lam+delta}(x) - delta/2 dist^2_D(x)."""
    lhs = penalized_eval(F, x)
    rhs = penalized_eval(F.with_lambda(F.lam + delta), x) - 0.5 * delta * dist_diag_sq(x, F.weights)
    return lhs, rhs


def descent_lemma_gap(f: SmoothObjective, x: np.ndarray, y: np.ndarray, lipschitz: float) -> float:
    """L/2 ||y - x||^2 + <grad f(x), y - x> - (f(y) - f(x)); nonnegative when the lemma holds."""
    d = y - x
    return 0.5 * lipschitz * float(d @ d) + float(f.gradient(x) @ d) - (f.value(y) - f.value(x))


def penalized_descent_gap(F: PenalizedObjective, x: ProductPoint, y: ProductPoint) -> float:
    """Descent-lemma slack of F_lam with constant L + lam in the weighted metric."""
    d = y.data - x.data
    w = F.weights.omega
    sq = float(w @ block_dots(d, d))
    lin = float(w @ block_dots(penalized_grad(F, x).data, d))
    return 0.5 * F.smoothness * sq + lin - (penalized_eval(F, y) - penalized_eval(F, x))
