"""Synthetic data from zero-mean Gaussian mixtures with banded precisions."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidInput
from .mixture import MixtureParams
from .symlin import cholesky


@dataclass
class SimTruth:
    params: MixtureParams
    labels: np.ndarray
    seed: int


def chain_precision(p, offset=1, diag=1.0, offdiag=-0.4):
    """Banded precision: ``diag`` on the diagonal, ``offdiag`` where |i-j| == offset.

    Raises NotPositiveDefinite when the band is too heavy for the diagonal.
    """
    if p < 1:
        raise InvalidInput("p must be >= 1")
    if offset < 1:
        raise InvalidInput("offset must be >= 1")
    m = np.eye(p) * diag
    if offset < p:
        idx = np.arange(p - offset)
        m[idx, idx + offset] = offdiag
        m[idx + offset, idx] = offdiag
    cholesky(m)
    return m


def paper_params(p=10, pi=0.5):
    """Two components: chain of offset 1 and chain of offset 2."""
    return MixtureParams(np.array([pi, 1.0 - pi]),
                         np.stack([chain_precision(p, 1), chain_precision(p, 2)]))


def sample_component(theta, n, rng):
    """Draw ``n`` rows from N(0, theta^-1) by solving ``L^T y = z``."""
    L = cholesky(theta)
    z = rng.standard_normal((L.shape[0], n))
    return solve_triangular(L.T, z, lower=False).T


def sample_mixture(params, n, seed):
    """Draw labels categorically by ``params.pi``, then rows per component."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.choice(params.k, size=n, p=params.pi)
    x = np.empty((n, params.p))
    for k in range(params.k):
        idx = np.flatnonzero(labels == k)
        if idx.size:
            x[idx] = sample_component(params.thetas[k], idx.size, rng)
    return x, SimTruth(params=params, labels=labels, seed=int(seed))
