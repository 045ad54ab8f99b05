"""
Small dense symmetric-matrix kernels: determinant, cofactors and the
adjugate quadratic form.
"""

import logging
from typing import Sequence

import numpy as np

from ma_core.errors import DimensionError, OrderError

logger = logging.getLogger(__name__)

TINY = 1e-300


def as_symmetric(m) -> np.ndarray:
    """Validate a square, finite, symmetric matrix and return it as float array."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("Matrix entries must be finite")
    if not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        raise ValueError("Matrix is not symmetric")
    return a


def _det(a: np.ndarray) -> float:
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if n == 3:
        return float(
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
    # LAPACK LU with partial pivoting
    return float(np.linalg.det(a))


def determinant(m) -> float:
    """
    Determinant: closed-form cofactor expansion for n <= 3, LU with partial
    pivoting for n >= 4. A singular matrix yields 0 up to round-off.
    """
    return _det(as_symmetric(m))


def _minor(a: np.ndarray, i: int, j: int) -> np.ndarray:
    keep_rows = np.arange(a.shape[0]) != i
    keep_cols = np.arange(a.shape[1]) != j
    return a[keep_rows][:, keep_cols]


def cofactor_matrix(m) -> np.ndarray:
    """
    Cofactors H_ij = (-1)^(i+j) M_ij from deleted row/column determinants.

    Valid for singular matrices. The upper triangle is computed and mirrored.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    if n < 2:
        raise OrderError(f"Cofactors need order >= 2, got {n}")
    cof = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            value = (-1.0) ** (i + j) * _det(_minor(a, i, j))
            cof[i, j] = value
            cof[j, i] = value
    return cof


def adjugate_quadratic_form(m, v: Sequence[float]) -> float:
    """sum_ij v_i v_j H_ij with H the cofactor matrix of ``m``."""
    a = as_symmetric(m)
    vec = np.asarray(v, dtype=float)
    if vec.shape != (a.shape[0],):
        raise DimensionError(
            f"Vector of length {vec.shape} does not match order {a.shape[0]}"
        )
    if a.shape[0] == 1:
        # adj of a 1x1 matrix is [1]
        return float(vec[0] * vec[0])
    return float(vec @ cofactor_matrix(a) @ vec)


def frobenius_scale(m) -> float:
    """||m||_F ** n, the natural magnitude of an order-n determinant."""
    a = np.asarray(m, dtype=float)
    return float(np.linalg.norm(a) ** a.shape[0])


def relative_error(lhs: float, rhs: float, scale: float = 0.0) -> float:
    """|lhs - rhs| / max(|lhs|, |rhs|, scale, 1e-300)."""
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), abs(scale), TINY)


def determinant_lemma_residual(m, v: Sequence[float], s: float, c: float) -> float:
    """
    Relative residual of det(s*m + c*v v^T) = s^n det(m) + c s^(n-1) v^T adj(m) v.
    """
    a = as_symmetric(m)
    vec = np.asarray(v, dtype=float)
    n = a.shape[0]
    lhs = _det(s * a + c * np.outer(vec, vec))
    rhs = s**n * _det(a) + c * s ** (n - 1) * adjugate_quadratic_form(a, vec)
    scale = frobenius_scale(s * a) + abs(c) * float(vec @ vec) * frobenius_scale(
        s * a
    ) ** ((n - 1) / n)
    logger.debug("determinant lemma lhs=%r rhs=%r", lhs, rhs)
    return relative_error(lhs, rhs, scale)
