"""Sparse Gaussian graphical mixture models fitted by penalized EM."""
from .errors import (ClusterCollapse, DegenerateResponsibility, DimensionMismatch,
                     GGMMError, InvalidInput, NotConverged, NotPositiveDefinite, ParseError)
from .glasso import GlassoConfig, GlassoSolution, glasso_fit
from .mixture import EmControl, EmReport, MixtureParams, em_fit, e_step, penalized_loglik
from .modelsel import PenaltyConfig, SelectionReport, ebic, lambda_grid, select
from .simulate import SimTruth, chain_precision, paper_params, sample_mixture
from .evalmetrics import RecoveryReport, recovery_report

__version__ = "0.1.0"
