"""Dense symmetric linear algebra helpers.

Matrices are plain ``numpy.ndarray`` objects of shape ``(p, p)``. The
factorization itself is delegated to LAPACK through numpy; this module adds
the positive-definiteness policy and symmetric bookkeeping on top.
"""
import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidInput, NotPositiveDefinite

# Smallest admissible Cholesky pivot (the squared diagonal of L).
PIVOT_TOL = 1e-12


def as_sym(a, check=True):
    """Return ``a`` as a float square matrix, mirrored to exact symmetry.

    The upper triangle is copied from the lower one, so callers that wrote
    only the lower triangle get a valid symmetric matrix back.
    """
    a = np.array(a, dtype=float, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInput(f"expected a non-empty square matrix, got shape {a.shape}")
    if check and not np.all(np.isfinite(a)):
        raise InvalidInput("matrix contains NaN or Inf")
    return np.tril(a) + np.tril(a, -1).T


def cholesky(a):
    """Lower-triangular ``L`` with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefinite
        If LAPACK rejects ``a`` or any pivot ``L_ii**2`` is below ``PIVOT_TOL``.
    """
    a = np.asarray(a, dtype=float)
    try:
        L = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    piv = np.diag(L) ** 2
    if not np.all(piv >= PIVOT_TOL):
        raise NotPositiveDefinite(f"Cholesky pivot {piv.min():.3e} below {PIVOT_TOL}")
    return L


def log_det(a):
    L = cholesky(a)
    return 2.0 * np.sum(np.log(np.diag(L)))


def inverse(a):
    """Inverse of a positive-definite matrix via its Cholesky factor."""
    L = cholesky(a)
    p = L.shape[0]
    Linv = solve_triangular(L, np.eye(p), lower=True)
    inv = Linv.T @ Linv
    return 0.5 * (inv + inv.T)


def is_pd(a):
    try:
        cholesky(a)
    except NotPositiveDefinite:
        return False
    return True


def l1_norm(a):
    """Elementwise absolute sum, diagonal included."""
    return float(np.abs(a).sum())
