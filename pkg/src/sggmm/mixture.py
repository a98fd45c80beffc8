"""Penalized EM for zero-mean Gaussian graphical mixtures.

Each component k has mixing weight ``pi[k]`` and precision matrix
``thetas[k]``. The objective is the observed log-likelihood minus
``lambda_n * sum_k ||thetas[k]||_1`` with the diagonal included in the norm.
"""
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.special import logsumexp

from .errors import (ClusterCollapse, DegenerateResponsibility, InvalidInput,
                     NotPositiveDefinite)
from .glasso import GlassoConfig, glasso_fit
from .symlin import as_sym, cholesky, l1_norm

log = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)
INIT_POLICIES = ("dirichlet", "kmeans")


@dataclass
class MixtureParams:
    pi: np.ndarray
    thetas: np.ndarray

    def __post_init__(self):
        self.pi = np.atleast_1d(np.asarray(self.pi, dtype=float))
        self.thetas = np.asarray(self.thetas, dtype=float)
        if self.thetas.ndim == 2:
            self.thetas = self.thetas[None]
        if self.thetas.ndim != 3 or self.thetas.shape[1] != self.thetas.shape[2]:
            raise InvalidInput(f"thetas must have shape (K, p, p), got {self.thetas.shape}")
        if self.thetas.shape[0] != self.pi.shape[0]:
            raise InvalidInput("pi and thetas disagree on K")
        if np.any(self.pi <= 0) or abs(self.pi.sum() - 1.0) > 1e-12:
            raise InvalidInput(f"pi must be positive and sum to 1, got {self.pi}")
        self.thetas = np.stack([as_sym(t) for t in self.thetas])
        for t in self.thetas:
            cholesky(t)

    @property
    def k(self):
        return self.pi.shape[0]

    @property
    def p(self):
        return self.thetas.shape[1]

    def permuted(self, order):
        order = list(order)
        return MixtureParams(self.pi[order], self.thetas[order])


@dataclass(frozen=True)
class EmControl:
    tol: float = 1e-6
    max_iters: int = 500
    restarts: int = 5
    seed: int = 0
    init: str = "dirichlet"
    dirichlet_alpha: float = 5.0
    center: bool = False
    warm_start: bool = True
    glasso: GlassoConfig = field(default_factory=GlassoConfig)

    def __post_init__(self):
        if self.init not in INIT_POLICIES:
            raise InvalidInput(f"unknown init policy {self.init!r}")
        if self.restarts < 1 or self.max_iters < 1 or not self.tol > 0:
            raise InvalidInput("restarts, max_iters and tol must be positive")


@dataclass
class EmReport:
    params: MixtureParams
    responsibilities: np.ndarray
    loglik_trace: list
    iterations: int
    converged: bool
    restart_index: int
    lambda_n: float
    restart_logliks: list = field(default_factory=list)
    glasso_converged: bool = True

    @property
    def penalized_loglik(self):
        return self.loglik_trace[-1]


def as_dataset(data):
    x = np.array(data, dtype=float, ndmin=2)
    if x.ndim != 2:
        raise InvalidInput(f"data must be 2-D, got shape {x.shape}")
    n, p = x.shape
    if n < 2 or p < 1:
        raise InvalidInput(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("data contains NaN or Inf")
    return x


def collapse_floor(n):
    return max(1.0, 1e-3 * n)


def log_component_density(y, theta):
    """Log of the N(0, theta^-1) density at a single observation ``y``."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return float(_log_densities(y[None, :], np.asarray(theta, dtype=float)[None])[0, 0])


def _log_densities(x, thetas):
    n, p = x.shape
    out = np.empty((n, len(thetas)))
    for k, theta in enumerate(thetas):
        L = cholesky(theta)
        z = x @ L  # row i holds (L^T y_i)^T, so y' theta y = |z_i|^2
        out[:, k] = -0.5 * p * LOG_2PI + np.sum(np.log(np.diag(L))) - 0.5 * np.einsum("ij,ij->i", z, z)
    return out


def _log_masses(x, params):
    with np.errstate(divide="ignore"):
        return np.log(params.pi)[None, :] + _log_densities(x, params.thetas)


def e_step(data, params):
    """Posterior component memberships, one row per observation."""
    lm = _log_masses(as_dataset(data), params)
    top = lm.max(axis=1, keepdims=True)
    if not np.all(np.isfinite(top)):
        bad = int(np.flatnonzero(~np.isfinite(top[:, 0]))[0])
        raise DegenerateResponsibility(f"all component masses vanish for row {bad}")
    w = np.exp(lm - top)
    return w / w.sum(axis=1, keepdims=True)


def m_step_pi(resp, floor=None):
    resp = np.asarray(resp, dtype=float)
    n = resp.shape[0]
    mass = resp.sum(axis=0)
    floor = collapse_floor(n) if floor is None else floor
    if np.any(mass < floor):
        k = int(np.argmin(mass))
        raise ClusterCollapse(f"component {k} mass {mass[k]:.4g} below floor {floor:.4g}", mass[k])
    return mass / n


def weighted_covariance(data, resp, k):
    """Responsibility-weighted second moment of component ``k`` (no centering)."""
    x = np.asarray(data, dtype=float)
    w = np.asarray(resp, dtype=float)[:, k]
    tot = w.sum()
    if not tot > 0:
        raise ClusterCollapse(f"component {k} has zero responsibility mass", tot)
    s = (x * w[:, None]).T @ x / tot
    return 0.5 * (s + s.T)


def m_step_theta(s_tilde, omega_dot_k, lambda_n, cfg=None, warm_start=None):
    """Glasso update for one component, penalty rescaled to ``2 lambda_n / omega_dot_k``."""
    if not omega_dot_k > 0:
        raise ClusterCollapse("omega_dot_k must be positive", omega_dot_k)
    if lambda_n < 0:
        raise InvalidInput("lambda_n must be nonnegative")
    cfg = (cfg or GlassoConfig()).with_lam(2.0 * lambda_n / omega_dot_k)
    return glasso_fit(s_tilde, cfg, warm_start=warm_start, strict=False)


def loglik(data, params):
    return float(logsumexp(_log_masses(np.asarray(data, dtype=float), params), axis=1).sum())


def penalized_loglik(data, params, lambda_n):
    pen = sum(l1_norm(t) for t in params.thetas)
    return loglik(data, params) - lambda_n * pen


def m_step(data, resp, lambda_n, cfg=None, warm=None):
    """Full M-step. Returns the new params and whether every glasso converged."""
    pi = m_step_pi(resp)
    mass = pi * resp.shape[0]
    thetas, ok = [], True
    for k in range(resp.shape[1]):
        s = weighted_covariance(data, resp, k)
        sol = m_step_theta(s, mass[k], lambda_n, cfg,
                           warm_start=None if warm is None else warm.thetas[k])
        ok &= sol.converged
        thetas.append(sol.theta)
    # m_step_pi sums to 1 up to rounding; renormalize so the 1e-12 check holds.
    return MixtureParams(pi / pi.sum(), np.stack(thetas)), ok


def init_responsibilities(data, k, policy, rng, alpha=5.0):
    n = data.shape[0]
    if k == 1:
        return np.ones((n, 1))
    if policy == "dirichlet":
        return rng.dirichlet(np.full(k, alpha), size=n)
    if policy == "kmeans":
        _, labels = kmeans2(data, k, iter=10, minit="++", seed=rng)
        resp = np.full((n, k), 0.1 / (k - 1))
        resp[np.arange(n), labels] = 0.9
        return resp
    raise InvalidInput(f"unknown init policy {policy!r}")


def _run_once(x, k, lambda_n, ctrl, rng):
    resp = init_responsibilities(x, k, ctrl.init, rng, ctrl.dirichlet_alpha)
    params, gl_ok = m_step(x, resp, lambda_n, ctrl.glasso)
    trace = [penalized_loglik(x, params, lambda_n)]
    converged = False
    it = 0
    while it < ctrl.max_iters:
        it += 1
        resp = e_step(x, params)
        params, ok = m_step(x, resp, lambda_n, ctrl.glasso,
                            warm=params if ctrl.warm_start else None)
        gl_ok &= ok
        trace.append(penalized_loglik(x, params, lambda_n))
        if abs(trace[-1] - trace[-2]) / (1.0 + abs(trace[-1])) < ctrl.tol:
            converged = True
            break
    resp = e_step(x, params)
    return params, resp, trace, it, converged, gl_ok


def em_fit(data, k, lambda_n, ctrl=None):
    """Fit a K-component sparse Gaussian graphical mixture by penalized EM.

    Runs ``ctrl.restarts`` independently seeded initializations and keeps the
    one with the highest final penalized log-likelihood (earliest wins ties).
    Components of the returned fit are ordered by decreasing mixing weight.

    Raises
    ------
    ClusterCollapse
        If every restart collapsed a component.
    """
    ctrl = ctrl or EmControl()
    if k < 1:
        raise InvalidInput("k must be >= 1")
    x = as_dataset(data)
    if ctrl.center:
        x = x - x.mean(axis=0)
    streams = np.random.SeedSequence(ctrl.seed).spawn(ctrl.restarts)
    best, best_idx, finals, last_err = None, -1, [], None
    for r, ss in enumerate(streams):
        try:
            out = _run_once(x, k, lambda_n, ctrl, np.random.default_rng(ss))
        except (ClusterCollapse, DegenerateResponsibility, NotPositiveDefinite) as exc:
            log.debug("restart %d failed: %s", r, exc)
            finals.append(None)
            last_err = exc
            continue
        finals.append(out[2][-1])
        if best is None or out[2][-1] > best[2][-1]:
            best, best_idx = out, r
    if best is None:
        if isinstance(last_err, ClusterCollapse):
            raise last_err
        raise ClusterCollapse(f"all {ctrl.restarts} restarts failed: {last_err}")
    params, resp, trace, it, converged, gl_ok = best
    order = np.argsort(-params.pi, kind="stable")
    return EmReport(params=params.permuted(order), responsibilities=resp[:, order],
                    loglik_trace=[float(v) for v in trace], iterations=it,
                    converged=converged, restart_index=best_idx,
                    lambda_n=float(lambda_n), restart_logliks=finals,
                    glasso_converged=bool(gl_ok))
