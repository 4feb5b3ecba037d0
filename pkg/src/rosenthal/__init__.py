"""Moment-gap bounds from cumulant growth, exact log-determinant cumulants,
and Monte Carlo checks of moment convergence to the Gaussian."""

__version__ = "0.1.0"

from .bounds import GrowthSpec, DnaSpec, coefficient_A, moment_gap_bound
from .combinatorics import (
    CumulantSequence,
    MomentSequence,
    cumulants_from_moments,
    gaussian_moment,
    moments_from_cumulants,
)
from .exact_models import ModelKind, ModelSpec, model_cumulant, standardized_gap_exact
from .specfun import polygamma

__all__ = [
    "__version__",
    "CumulantSequence",
    "DnaSpec",
    "GrowthSpec",
    "ModelKind",
    "ModelSpec",
    "MomentSequence",
    "coefficient_A",
    "cumulants_from_moments",
    "gaussian_moment",
    "model_cumulant",
    "moment_gap_bound",
    "moments_from_cumulants",
    "polygamma",
    "standardized_gap_exact",
]
