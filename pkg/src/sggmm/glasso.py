"""Graphical lasso with the L1 penalty applied to every entry, diagonal included.

Maximizes ``log det(T) - tr(S T) - lam * sum_ij |T_ij|`` over positive
definite ``T`` by block coordinate descent over columns of the working
covariance ``W``, each column solved as a lasso by coordinate descent.
Penalizing the diagonal pins ``W_ii = S_ii + lam`` for the whole run.
"""
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidInput, NotConverged, NotPositiveDefinite
from .symlin import as_sym, inverse, is_pd, l1_norm, log_det

KKT_TOL = 1e-4


@dataclass(frozen=True)
class GlassoConfig:
    lam: float = 0.0
    max_sweeps: int = 200
    conv_tol: float = 1e-6
    inner_tol: float = 1e-10
    inner_max_iter: int = 1000

    def __post_init__(self):
        if not self.lam >= 0:
            raise InvalidInput(f"lam must be >= 0, got {self.lam}")
        if not (self.conv_tol > 0 and self.inner_tol > 0):
            raise InvalidInput("tolerances must be positive")
        if self.max_sweeps < 1 or self.inner_max_iter < 1:
            raise InvalidInput("iteration limits must be >= 1")

    def with_lam(self, lam):
        return GlassoConfig(lam, self.max_sweeps, self.conv_tol,
                            self.inner_tol, self.inner_max_iter)


@dataclass
class GlassoSolution:
    theta: np.ndarray
    sigma: np.ndarray
    iterations: int
    max_kkt_violation: float
    objective: float
    converged: bool = True


def soft_threshold(x, t):
    if t < 0:
        raise InvalidInput("threshold must be nonnegative")
    return float(np.sign(x) * max(abs(x) - t, 0.0))


def objective(theta, s, lam):
    """``log det(theta) - tr(s theta) - lam * ||theta||_1`` (all entries)."""
    theta = np.asarray(theta, dtype=float)
    s = np.asarray(s, dtype=float)
    return log_det(theta) - float(np.sum(s * theta)) - lam * l1_norm(theta)


def kkt_violation(theta, s, lam, sigma=None):
    """Largest violation of the stationarity conditions at ``theta``.

    ``sigma`` defaults to the exact inverse of ``theta``. Zero entries use the
    subgradient bound ``|sigma_ij - s_ij| <= lam``.
    """
    if sigma is None:
        sigma = inverse(theta)
    g = sigma - s
    nz = theta != 0
    viol = np.where(nz, np.abs(g - lam * np.sign(theta)),
                    np.maximum(np.abs(g) - lam, 0.0))
    return float(viol.max())


@njit(cache=True)
def _soft(x, t):
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


@njit(cache=True)
def _bcd(S, lam, W, B, max_sweeps, conv_tol, inner_tol, inner_max_iter):
    # W is the working covariance, column j of B the lasso coefficients for
    # column j. Both are updated in place.
    p = S.shape[0]
    off = 0.0
    for i in range(p):
        for j in range(p):
            if i != j:
                off += abs(S[i, j])
    if p > 1:
        off /= p * (p - 1)
    thresh = conv_tol * off if off > 0 else conv_tol * 1e-3
    W_old = np.empty_like(W)
    sweep = 0
    while sweep < max_sweeps:
        sweep += 1
        W_old[:, :] = W
        for j in range(p):
            for _ in range(inner_max_iter):
                dmax = 0.0
                for k in range(p):
                    if k == j:
                        continue
                    r = S[k, j]
                    for l in range(p):
                        if l != j and l != k:
                            r -= W[k, l] * B[l, j]
                    new = _soft(r, lam) / W[k, k]
                    d = abs(new - B[k, j])
                    if d > dmax:
                        dmax = d
                    B[k, j] = new
                if dmax < inner_tol:
                    break
            for k in range(p):
                if k == j:
                    continue
                acc = 0.0
                for l in range(p):
                    if l != j:
                        acc += W[k, l] * B[l, j]
                W[k, j] = acc
                W[j, k] = acc
        change = 0.0
        for i in range(p):
            for j in range(p):
                change += abs(W[i, j] - W_old[i, j])
        change /= p * p
        if change < thresh:
            return sweep, True
    return sweep, False


@njit(cache=True)
def _warm_columns(W, B):
    # Rebuild off-diagonal W columns from warm lasso coefficients.
    p = W.shape[0]
    for j in range(p):
        for k in range(p):
            if k == j:
                continue
            acc = 0.0
            for l in range(p):
                if l != j:
                    acc += W[k, l] * B[l, j]
            W[k, j] = acc
            W[j, k] = acc


@njit(cache=True)
def _theta_columns(W, B):
    p = W.shape[0]
    theta = np.zeros((p, p))
    for j in range(p):
        denom = W[j, j]
        for k in range(p):
            if k != j:
                denom -= W[k, j] * B[k, j]
        if not denom > 0:
            return theta, j
        tjj = 1.0 / denom
        theta[j, j] = tjj
        for k in range(p):
            if k != j:
                theta[k, j] = -B[k, j] * tjj
    return theta, -1


def _theta_from_columns(W, B):
    theta, bad = _theta_columns(W, B)
    if bad >= 0:
        raise NotPositiveDefinite(f"non-positive Schur complement in column {bad}")
    # + 0.0 turns -0.0 into 0.0 for clean serialization
    return 0.5 * (theta + theta.T) + 0.0


def glasso_fit(s, cfg=None, *, warm_start=None, strict=True):
    """Fit the diagonally penalized graphical lasso.

    Parameters
    ----------
    s : array_like, shape (p, p)
        Symmetric second-moment matrix with nonnegative diagonal.
    cfg : GlassoConfig
    warm_start : array_like, optional
        A previous precision estimate; its column ratios seed the lasso
        coefficients.
    strict : bool
        If True, exhausting ``cfg.max_sweeps`` raises ``NotConverged`` carrying
        the last iterate. Otherwise that iterate is returned with
        ``converged=False``.
    """
    cfg = cfg or GlassoConfig()
    s = as_sym(s, check=False)
    if not np.all(np.isfinite(s)):
        raise InvalidInput("s contains NaN or Inf")
    if np.any(np.diag(s) < 0):
        raise InvalidInput("s has a negative diagonal entry")
    p = s.shape[0]
    lam = float(cfg.lam)

    if lam == 0.0:
        try:
            theta = inverse(s)
        except NotPositiveDefinite:
            raise NotConverged("unpenalized fit of a singular matrix has no solution") from None
        return GlassoSolution(theta, s.copy(), 0, kkt_violation(theta, s, 0.0),
                              objective(theta, s, 0.0))

    W = s + lam * np.eye(p)
    B = np.zeros((p, p))
    if warm_start is not None:
        t0 = np.asarray(warm_start, dtype=float)
        B = -t0 / np.diag(t0)[None, :]
        np.fill_diagonal(B, 0.0)
        _warm_columns(W, B)
        if not is_pd(W):
            W = s + lam * np.eye(p)
            B[:] = 0.0

    sweeps, ok = _bcd(s, lam, W, B, cfg.max_sweeps, cfg.conv_tol,
                      cfg.inner_tol, cfg.inner_max_iter)
    W = 0.5 * (W + W.T)
    theta = _theta_from_columns(W, B)
    sol = GlassoSolution(theta=theta, sigma=W, iterations=int(sweeps),
                         max_kkt_violation=kkt_violation(theta, s, lam),
                         objective=objective(theta, s, lam), converged=bool(ok))
    if not ok and strict:
        raise NotConverged(f"glasso did not converge in {cfg.max_sweeps} sweeps", sol)
    return sol
