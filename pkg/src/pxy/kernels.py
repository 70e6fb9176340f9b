"""Gaussian-kernel bandwidth rules.

Three plug-in rules, all of the normal-reference family, all using the
n-1 sample standard deviation:

- ``silverman_density_bw``: h = (4 sigma^5 / (3 n))^(1/5), the classic
  rule-of-thumb for density estimation.
- ``cdf_bw``: h = 1.587 sigma n^(-1/3), the faster-shrinking rate
  appropriate when the object of interest is a distribution function
  rather than a density.
- ``diagonal_bw_2d``: diagonal matrix with per-axis scale
  sigma_axis * n^(-1/6), the normal-reference rate for bivariate density
  estimation.  Entries are stored squared because the matrix plays the
  covariance role of the bivariate Gaussian kernel.

Every rule rejects degenerate (zero-spread) input rather than returning a
zero bandwidth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DegenerateSampleError, DomainError, PairedSample, sample_sd

__all__ = [
    "Bandwidth1D",
    "BandwidthMatrix2D",
    "silverman_density_bw",
    "cdf_bw",
    "diagonal_bw_2d",
]


@dataclass(frozen=True, slots=True)
class Bandwidth1D:
    """Positive scalar bandwidth for a univariate Gaussian kernel."""

    h: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.h) and self.h > 0.0):
            raise DomainError(f"bandwidth must be positive and finite, got {self.h!r}")


@dataclass(frozen=True, slots=True)
class BandwidthMatrix2D:
    """Symmetric positive-definite 2x2 bandwidth matrix.

    Plays the covariance role of the bivariate Gaussian kernel:
    the kernel centered at a data couple has covariance
    [[h11, h12], [h12, h22]].
    """

    h11: float
    h12: float
    h22: float

    def __post_init__(self) -> None:
        for name, v in (("h11", self.h11), ("h12", self.h12), ("h22", self.h22)):
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        det = self.h11 * self.h22 - self.h12 * self.h12
        if self.h11 <= 0.0 or self.h22 <= 0.0 or det <= 0.0:
            raise DomainError(
                "bandwidth matrix must be positive definite, got "
                f"h11={self.h11}, h12={self.h12}, h22={self.h22} (det={det})"
            )


def _spread(values, what: str) -> float:
    sd = sample_sd(values)
    if sd == 0.0:
        raise DegenerateSampleError(f"{what}: sample has zero spread")
    return sd


def silverman_density_bw(values) -> Bandwidth1D:
    """Rule-of-thumb density bandwidth (4 sigma^5 / (3 n))^(1/5)."""
    sd = _spread(values, "silverman_density_bw")
    n = len(values)
    return Bandwidth1D(sd * (4.0 / (3.0 * n)) ** 0.2)


def cdf_bw(values) -> Bandwidth1D:
    """Distribution-function bandwidth 1.587 sigma n^(-1/3)."""
    sd = _spread(values, "cdf_bw")
    n = len(values)
    return Bandwidth1D(1.587 * sd * n ** (-1.0 / 3.0))


def diagonal_bw_2d(sample: PairedSample) -> BandwidthMatrix2D:
    """Diagonal bivariate bandwidth with per-axis scale sigma * n^(-1/6).

    The returned entries are the squared scales, i.e. the kernel covariance
    diag((sigma_x n^(-1/6))^2, (sigma_y n^(-1/6))^2).
    """
    sx = _spread(sample.x, "diagonal_bw_2d (x margin)")
    sy = _spread(sample.y, "diagonal_bw_2d (y margin)")
    shrink = float(sample.n) ** (-1.0 / 6.0)
    return BandwidthMatrix2D((sx * shrink) ** 2, 0.0, (sy * shrink) ** 2)
