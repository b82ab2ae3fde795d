"""Dense primitives: ridge-regularized pseudoinverse and row-wise Pearson correlation.

Matrices are stored samples-as-rows. The regularization constant ``c`` follows
the regularized-ELM convention: the ridge term added to the Gram matrix is
``1 / c``, so a larger ``c`` means weaker regularization.
"""

import numpy as np
import scipy.linalg as la

from .errors import DimensionMismatch, NonFinite, SolveFailure

C_MIN = 2.0 ** -10
C_MAX = 2.0 ** 10


def _as_matrix(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return a


def ridge_lambda(c):
    c = float(c)
    if not c > 0 or not np.isfinite(c):
        raise ValueError(f"regularization constant must be positive and finite, got {c}")
    return 1.0 / c


def _spd_solve(gram, rhs):
    # gram is symmetric positive definite whenever lambda > 0
    try:
        factor = la.cho_factor(gram, lower=True, check_finite=False)
        out = la.cho_solve(factor, rhs, check_finite=False)
    except la.LinAlgError as exc:
        raise SolveFailure(f"regularized system is singular: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise SolveFailure("regularized solve produced non-finite values")
    return out


def _ridge_apply(h, rhs, lam):
    """Return pinv_ridge(h) @ rhs without forming the pseudoinverse."""
    n, p = h.shape
    if n <= p:
        gram = h @ h.T
        gram[np.diag_indices_from(gram)] += lam
        return h.T @ _spd_solve(gram, rhs)
    gram = h.T @ h
    gram[np.diag_indices_from(gram)] += lam
    return _spd_solve(gram, h.T @ rhs)


def ridge_pseudoinverse(h, c):
    """Ridge-regularized Moore-Penrose pseudoinverse of ``h`` (n x p -> p x n).

    Uses ``H^T (lam I + H H^T)^-1`` when n <= p and ``(lam I + H^T H)^-1 H^T``
    otherwise, with ``lam = 1 / c``. Both forms are algebraically identical; the
    shape rule just picks the smaller system.
    """
    h = _as_matrix(h, "h")
    if h.size == 0:
        raise DimensionMismatch("h must be nonempty")
    lam = ridge_lambda(c)
    n, p = h.shape
    if n <= p:
        gram = h @ h.T
        gram[np.diag_indices_from(gram)] += lam
        return _spd_solve(gram, h).T
    gram = h.T @ h
    gram[np.diag_indices_from(gram)] += lam
    return _spd_solve(gram, h.T)


def solve_output_weights(h, x, c):
    """Output weights ``beta = pinv_ridge(h) @ x`` for hidden outputs ``h`` and targets ``x``."""
    h = _as_matrix(h, "h")
    x = _as_matrix(x, "x")
    if h.shape[0] != x.shape[0]:
        raise DimensionMismatch(f"h has {h.shape[0]} rows but x has {x.shape[0]}")
    if h.size == 0:
        raise DimensionMismatch("h must be nonempty")
    return _ridge_apply(h, x, ridge_lambda(c))


def pearson_rowwise(x, xhat, return_mask=False, rtol=1e-12):
    """Pearson correlation between matching rows of ``x`` and ``xhat``.

    Correlation runs over the feature (column) axis. Rows where either side is
    constant get a correlation of 0; with ``return_mask=True`` a boolean array
    marking those rows is returned as well.
    """
    x = _as_matrix(x, "x")
    xhat = _as_matrix(xhat, "xhat")
    if x.shape != xhat.shape:
        raise DimensionMismatch(f"shape mismatch: {x.shape} vs {xhat.shape}")
    n, d = x.shape
    if n and d < 2:
        raise DimensionMismatch("correlation needs at least 2 features per row")
    if n == 0:
        phi = np.zeros(0)
        return (phi, np.zeros(0, dtype=bool)) if return_mask else phi

    xc = x - x.mean(axis=1, keepdims=True)
    yc = xhat - xhat.mean(axis=1, keepdims=True)
    sx = np.sqrt(np.einsum("ij,ij->i", xc, xc) / d)
    sy = np.sqrt(np.einsum("ij,ij->i", yc, yc) / d)
    cov = np.einsum("ij,ij->i", xc, yc) / d

    scale_x = np.maximum(np.abs(x).max(axis=1), 1.0)
    scale_y = np.maximum(np.abs(xhat).max(axis=1), 1.0)
    flat = (sx <= rtol * scale_x) | (sy <= rtol * scale_y)

    denom = np.where(flat, 1.0, sx * sy)
    phi = np.where(flat, 0.0, cov / denom)
    np.clip(phi, -1.0, 1.0, out=phi)
    if return_mask:
        return phi, flat
    return phi
