"""Penalty grids and EBIC-based choice of the penalty level."""
from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np

from .errors import ClusterCollapse, GGMMError, InvalidInput
from .mixture import EmControl, EmReport, as_dataset, em_fit, loglik

log = logging.getLogger(__name__)

SCHEMES = ("nlogp", "logp")
EDGE_TOL = 1e-6


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty grid ``[c1 * B, c2 * B]``.

    ``B`` is ``sqrt(n log p)`` for ``nlogp`` and ``sqrt(log p)`` for ``logp``.
    """
    scheme: str = "nlogp"
    c1: float = 0.1
    c2: float = 0.25
    grid_size: int = 10
    gamma_ebic: float = 0.5
    penalized_ebic: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidInput(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0 < self.c1 < self.c2:
            raise InvalidInput("need 0 < c1 < c2")
        if self.grid_size < 1:
            raise InvalidInput("grid_size must be >= 1")


@dataclass
class SelectionReport:
    grid: list
    ebic_values: list
    chosen_lambda: float
    chosen_fit: EmReport
    fits: list = field(default_factory=list)


def lambda_grid(cfg, n, p):
    if n < 2 or p < 2:
        raise InvalidInput(f"lambda grid needs n >= 2 and p >= 2 (got n={n}, p={p})")
    base = math.sqrt(n * math.log(p)) if cfg.scheme == "nlogp" else math.sqrt(math.log(p))
    if cfg.grid_size == 1:
        return [0.5 * (cfg.c1 + cfg.c2) * base]
    return list(np.linspace(cfg.c1 * base, cfg.c2 * base, cfg.grid_size))


def degrees_of_freedom(params, tol=EDGE_TOL):
    """Mixing weights (K-1) plus, per component, p diagonals and upper-triangle support."""
    p = params.p
    iu = np.triu_indices(p, 1)
    edges = sum(int(np.sum(np.abs(t[iu]) > tol)) for t in params.thetas)
    return (params.k - 1) + params.k * p + edges


def ebic_value(ll, df, n, p, gamma_ebic):
    return -2.0 * ll + df * math.log(n) + 4.0 * gamma_ebic * df * math.log(p)


def ebic(report, data, gamma_ebic=0.5, penalized=False):
    """Extended BIC of a fitted mixture.

    Uses the unpenalized observed log-likelihood unless ``penalized``.
    """
    x = as_dataset(data)
    n, p = x.shape
    ll = report.penalized_loglik if penalized else loglik(x, report.params)
    return ebic_value(ll, degrees_of_freedom(report.params), n, p, gamma_ebic)


def grid_seeds(seed, m):
    """Independent per-grid-point seeds derived from a master seed."""
    return [int(ss.generate_state(1)[0]) for ss in np.random.SeedSequence(seed).spawn(m)]


def select(data, k, cfg=None, ctrl=None):
    """Fit one mixture per grid penalty and keep the lowest EBIC.

    Each grid point gets its own seed stream spawned from ``ctrl.seed``.
    Ties go to the larger penalty. Grid points that fail are recorded with
    EBIC ``inf``; only if every point fails is the last error raised.
    """
    cfg = cfg or PenaltyConfig()
    ctrl = ctrl or EmControl()
    x = as_dataset(data)
    if ctrl.center:
        x = x - x.mean(axis=0)
        ctrl = replace(ctrl, center=False)
    n, p = x.shape
    grid = lambda_grid(cfg, n, p)
    values, fits, last_err = [], [], None
    for lam, seed in zip(grid, grid_seeds(ctrl.seed, len(grid))):
        sub = replace(ctrl, seed=seed)
        try:
            fit = em_fit(x, k, lam, sub)
        except GGMMError as exc:
            log.info("lambda=%.4g failed: %s", lam, exc)
            values.append(math.inf)
            fits.append(None)
            last_err = exc
            continue
        values.append(ebic(fit, x, cfg.gamma_ebic, cfg.penalized_ebic))
        fits.append(fit)
    if all(f is None for f in fits):
        raise last_err if last_err is not None else ClusterCollapse("no grid point succeeded")
    best = None
    for i, v in enumerate(values):
        if fits[i] is not None and (best is None or v <= values[best]):
            best = i
    return SelectionReport(grid=[float(g) for g in grid], ebic_values=[float(v) for v in values],
                           chosen_lambda=float(grid[best]), chosen_fit=fits[best], fits=fits)

