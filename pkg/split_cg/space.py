"""Product-space algebra on the weighted space H^m.

Points of H are dense 1-D float arrays. A ProductPoint holds m such blocks as an
immutable (m, n) array. Inner products, norms and gradients on the product space
are taken with respect to the weighted inner product sum_i w_i <x^i, y^i>.
"""

from typing import Optional, Sequence, Union

import numpy as np

from split_cg.errors import DimensionMismatchError, WeightsError

WEIGHT_SUM_TOL = 1e-12

ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


def as_point(x: ArrayLike, dimension: Optional[int] = None) -> np.ndarray:
    """Validate and return a finite 1-D float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionMismatchError(f'point must be 1-D, got shape {arr.shape}')
    if dimension is not None and arr.shape[0] != dimension:
        raise DimensionMismatchError(f'point has dimension {arr.shape[0]}, expected {dimension}')
    if not np.all(np.isfinite(arr)):
        raise ValueError('point has non-finite entries')
    return arr


class Weights:
    """Convex weights w_i in (0, 1] summing to one."""

    __slots__ = ('_omega',)

    def __init__(self, omega: ArrayLike):
        arr = np.array(omega, dtype=float).ravel()
        if arr.size == 0:
            raise WeightsError('at least one weight is required')
        if not np.all(np.isfinite(arr)):
            raise WeightsError(f'weights must be finite, got {arr.tolist()}')
        if np.any(arr <= 0.0) or np.any(arr > 1.0):
            raise WeightsError(f'every weight must lie in (0, 1], got {arr.tolist()}')
        total = float(arr.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise WeightsError(f'weights must sum to 1, got {total!r}')
        arr.setflags(write=False)
        self._omega = arr

    @classmethod
    def uniform(cls, m: int) -> 'Weights':
        """Equal weights 1/m."""
        if m < 1:
            raise WeightsError('at least one weight is required')
        return cls(np.full(m, 1.0 / m))

    @property
    def omega(self) -> np.ndarray:
        return self._omega

    @property
    def min(self) -> float:
        """Smallest weight."""
        return float(self._omega.min())

    def __len__(self) -> int:
        return self._omega.shape[0]

    def __iter__(self):
        return iter(self._omega.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, Weights) and np.array_equal(self._omega, other._omega)

    def __hash__(self) -> int:
        return hash(self._omega.tobytes())

    def __repr__(self) -> str:
        return f'Weights({self._omega.tolist()})'


class ProductPoint:
    """Element (x^1, ..., x^m) of H^m, all blocks of the same dimension."""

    __slots__ = ('_data',)

    def __init__(self, blocks: ArrayLike):
        try:
            data = np.array(blocks, dtype=float)
        except ValueError as e:
            raise DimensionMismatchError(f'blocks must share one dimension: {e}') from e
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DimensionMismatchError(f'expected m >= 1 blocks of dimension n >= 1, got shape {data.shape}')
        if not np.all(np.isfinite(data)):
            raise ValueError('product point has non-finite entries')
        data.setflags(write=False)
        self._data = data

    @classmethod
    def from_array(cls, data: np.ndarray) -> 'ProductPoint':
        """Wrap an (m, n) array produced by library code without re-validating shapes."""
        obj = cls.__new__(cls)
        data = np.array(data, dtype=float)
        data.setflags(write=False)
        obj._data = data
        return obj

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def m(self) -> int:
        return self._data.shape[0]

    @property
    def n(self) -> int:
        return self._data.shape[1]

    @property
    def blocks(self) -> list[np.ndarray]:
        """Blocks x^1, ..., x^m as read-only views."""
        return [self._data[i] for i in range(self.m)]

    def block(self, i: int) -> np.ndarray:
        return self._data[i]

    def __add__(self, other: 'ProductPoint') -> 'ProductPoint':
        _check_same_shape(self, other)
        return ProductPoint.from_array(self._data + other._data)

    def __sub__(self, other: 'ProductPoint') -> 'ProductPoint':
        _check_same_shape(self, other)
        return ProductPoint.from_array(self._data - other._data)

    def __mul__(self, scalar: float) -> 'ProductPoint':
        return ProductPoint.from_array(float(scalar) * self._data)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, ProductPoint) and np.array_equal(self._data, other._data)

    def __hash__(self) -> int:
        return hash((self._data.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f'ProductPoint({self._data.tolist()})'


def _check_same_shape(x: ProductPoint, y: ProductPoint):
    if x.data.shape != y.data.shape:
        raise DimensionMismatchError(f'shape mismatch: {x.data.shape} vs {y.data.shape}')


def _check_weights(x: ProductPoint, w: Weights):
    if len(w) != x.m:
        raise DimensionMismatchError(f'{len(w)} weights for {x.m} blocks')


def block_dots(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Blockwise Euclidean inner products of two (m, n) arrays."""
    return np.einsum('ij,ij->i', a, b)


def average(x: ProductPoint, w: Weights) -> np.ndarray:
    """A x = sum_i w_i x^i."""
    _check_weights(x, w)
    return w.omega @ x.data


def lift(x: ArrayLike, m: int) -> ProductPoint:
    """A* x = (x, ..., x) with m copies; lies in the diagonal subspace."""
    if m < 1:
        raise DimensionMismatchError('lift needs m >= 1 blocks')
    point = as_point(x)
    return ProductPoint.from_array(np.tile(point, (m, 1)))


def proj_diag(x: ProductPoint, w: Weights) -> ProductPoint:
    """Projection onto the diagonal subspace, A* A x."""
    return lift(average(x, w), x.m)


def dist_diag_sq(x: ProductPoint, w: Weights) -> float:
    """Squared weighted distance to the diagonal, sum_i w_i ||A x - x^i||^2."""
    diff = x.data - average(x, w)
    return float(w.omega @ block_dots(diff, diff))


def penalty_grad(x: ProductPoint, w: Weights) -> ProductPoint:
    """Weighted-metric gradient of dist^2/2: block i is x^i - A x."""
    return ProductPoint.from_array(x.data - average(x, w))


def inner(x: ProductPoint, y: ProductPoint, w: Weights) -> float:
    """Weighted inner product sum_i w_i <x^i, y^i>."""
    _check_same_shape(x, y)
    _check_weights(x, w)
    return float(w.omega @ block_dots(x.data, y.data))


def norm(x: ProductPoint, w: Weights) -> float:
    """Norm induced by the weighted inner product."""
    return float(np.sqrt(inner(x, x, w)))


def is_diagonal(x: ProductPoint, tol: float = 0.0) -> bool:
    """True when every block agrees with the first to within tol."""
    return bool(np.all(np.abs(x.data - x.data[0]) <= tol))


def to_weighted_gradient(g_euclid: ProductPoint, w: Weights) -> ProductPoint:
    """Convert a gradient taken in sum_i <.,.> into the weighted metric.

    A function's Euclidean partials with respect to block i carry a factor w_i
    relative to the weighted gradient, so block i is divided by w_i.
    """
    _check_weights(g_euclid, w)
    return ProductPoint.from_array(g_euclid.data / w.omega[:, None])


def to_euclidean_gradient(g: ProductPoint, w: Weights) -> ProductPoint:
    """Inverse of to_weighted_gradient: block i is multiplied by w_i."""
    _check_weights(g, w)
    return ProductPoint.from_array(g.data * w.omega[:, None])
