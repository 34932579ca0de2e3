"""Power iteration routines used by the spectral oracles and Lipschitz constants."""

from typing import Optional

import numpy as np

POWER_TOL = 1e-10
START_SEED = 0


def _start_vector(n: int) -> np.ndarray:
    v = np.random.default_rng(START_SEED).standard_normal(n)
    return v / np.linalg.norm(v)


def top_eigenpair_psd(matrix: np.ndarray, tol: float = POWER_TOL, max_iters: int = 1000) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a symmetric positive semidefinite matrix.

    Starts from a fixed pseudo-random vector so the result is reproducible.
    Stops when successive unit iterates differ by at most tol.
    """
    n = matrix.shape[0]
    v = _start_vector(n)
    for _ in range(max_iters):
        w = matrix @ v
        w_norm = np.linalg.norm(w)
        if w_norm == 0.0:
            # v lies in the null space; every unit vector attains the top eigenvalue 0 or the
            # matrix is zero
            break
        v_next = w / w_norm
        done = np.linalg.norm(v_next - v) <= tol
        v = v_next
        if done:
            break
    return float(v @ (matrix @ v)), v


def top_singular_pair(
    matrix: np.ndarray, tol: float = POWER_TOL, max_iters: Optional[int] = None
) -> tuple[np.ndarray, float, np.ndarray]:
    """Top singular triple (u, sigma, v) via power iteration on M^T M.

    A zero matrix returns the first coordinate vectors and sigma = 0.
    """
    rows, cols = matrix.shape
    if max_iters is None:
        max_iters = 10 * (rows + cols)
    if not np.any(matrix):
        u = np.zeros(rows)
        u[0] = 1.0
        v = np.zeros(cols)
        v[0] = 1.0
        return u, 0.0, v
    _, v = top_eigenpair_psd(matrix.T @ matrix, tol=tol, max_iters=max_iters)
    mv = matrix @ v
    sigma = float(np.linalg.norm(mv))
    if sigma == 0.0:
        u = np.zeros(rows)
        u[0] = 1.0
        return u, 0.0, v
    return mv / sigma, sigma, v


def min_eigenvector(symmetric: np.ndarray, shift: float, tol: float = POWER_TOL, max_iters: int = None) -> np.ndarray:
    """Unit eigenvector for the smallest eigenvalue of a symmetric matrix.

    Runs power iteration on shift * I - S, which is positive semidefinite when shift
    bounds the spectral radius of S.
    """
    n = symmetric.shape[0]
    if max_iters is None:
        max_iters = 100 * n
    if shift == 0.0:
        v = np.zeros(n)
        v[0] = 1.0
        return v
    _, v = top_eigenpair_psd(shift * np.eye(n) - symmetric, tol=tol, max_iters=max_iters)
    return v
