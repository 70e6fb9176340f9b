"""Nonparametric estimation of theta = P(X < Y) from paired samples.

The public surface re-exports the main entry points of each submodule;
see the package README for a tour.
"""

from .core import (
    DataFormatError,
    DegenerateSampleError,
    DiffSample,
    DomainError,
    InsufficientDataError,
    Method,
    NonConvergenceError,
    PairedSample,
    PxyError,
    Seed,
    ThetaEstimate,
    differences,
    pearson_correlation,
    sample_sd,
)

__all__ = [
    "DataFormatError",
    "DegenerateSampleError",
    "DiffSample",
    "DomainError",
    "InsufficientDataError",
    "Method",
    "NonConvergenceError",
    "PairedSample",
    "PxyError",
    "Seed",
    "ThetaEstimate",
    "differences",
    "pearson_correlation",
    "sample_sd",
]

__version__ = "0.1.0"
