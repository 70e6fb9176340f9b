"""Point estimators of theta = P(X < Y).

Two families plus a baseline:

* Difference-based (on z = y - x): empirical survival at zero
  (``theta_ecdf``), its kernel smoothing (``theta_kernel_1d``), and the
  shape-restricted pair ``theta_logconcave`` / ``theta_smoothed_logconcave``.
* Joint-density based: ``theta_kernel_2d`` integrates a bivariate Gaussian
  kernel density estimate over the half-plane {x < y}.
* Independence baseline: ``theta_independent`` multiplies the two marginal
  kernel density estimates, deliberately ignoring the pairing.  The
  "paired" estimator is the identical formula; pairing enters only through
  which bootstrap scheme resamples it.

For the Gaussian kernel every one of these integrals collapses to a closed
form in Phi, which is the primary evaluation path.  The Monte Carlo
companions (``theta_kernel_2d_mc``, ``theta_independent_mc``) sample the
same mixture distributions directly and exist to cross-validate the closed
forms; they are deliberately simple and share no algebra with them.

Closed forms, for reference: a Gaussian kernel placed at couple (x_j, y_j)
with covariance H puts mass Phi((y_j - x_j) / sqrt(h11 + h22 - 2 h12)) on
{x < y}, because V - U is normal with that variance; two independent
univariate kernels give Phi((y_j - x_i) / sqrt(hx^2 + hy^2)).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    DiffSample,
    DomainError,
    InsufficientDataError,
    Method,
    PairedSample,
    ThetaEstimate,
    differences,
)
from .kernels import (
    Bandwidth1D,
    BandwidthMatrix2D,
    cdf_bw,
    diagonal_bw_2d,
    silverman_density_bw,
)
from .logconcave import fit_logconcave, fit_smoothed, logconcave_cdf, smoothed_cdf
from .numerics import RngStream, normal_cdf

__all__ = [
    "EstimatorSpec",
    "theta_ecdf",
    "theta_kernel_1d",
    "theta_logconcave",
    "theta_smoothed_logconcave",
    "theta_kernel_2d",
    "theta_kernel_2d_mc",
    "theta_independent",
    "theta_independent_mc",
    "point_estimate",
]


@dataclass(frozen=True, slots=True)
class EstimatorSpec:
    """Which estimator to run, with optional overrides.

    ``bandwidth`` replaces the default data-driven rule (a ``Bandwidth1D``
    for the 1-D kernel, a ``BandwidthMatrix2D`` for the 2-D kernel, a pair
    ``(hx, hy)`` of ``Bandwidth1D`` for the independence baseline).
    ``mc_samples`` is only consulted by Monte Carlo oracle paths.
    """

    method: Method
    bandwidth: object = None
    mc_samples: int | None = None

    def __post_init__(self) -> None:
        bw = self.bandwidth
        if bw is None:
            return
        if self.method == Method.KERNEL_1D and isinstance(bw, Bandwidth1D):
            return
        if self.method == Method.KERNEL_2D and isinstance(bw, BandwidthMatrix2D):
            return
        if self.method in (Method.INDEPENDENT, Method.PAIRED):
            if (
                isinstance(bw, tuple)
                and len(bw) == 2
                and all(isinstance(b, Bandwidth1D) for b in bw)
            ):
                return
        raise DomainError(
            f"bandwidth override {bw!r} does not fit method {self.method.value}"
        )


def theta_ecdf(z: DiffSample) -> ThetaEstimate:
    """Empirical survival of Z at zero: the fraction of strictly positive
    differences.  Ties z_i = 0 count as not-greater."""
    return ThetaEstimate(float(np.mean(z.z > 0.0)), Method.ECDF)


def theta_kernel_1d(z: DiffSample, h: Bandwidth1D) -> ThetaEstimate:
    """Kernel-smoothed survival estimate (1/n) sum Phi(z_j / h)."""
    return ThetaEstimate(float(np.mean(normal_cdf(z.z / h.h))), Method.KERNEL_1D)


def theta_logconcave(z: DiffSample) -> ThetaEstimate:
    """1 - F(0) under the log-concave maximum likelihood density of Z."""
    return ThetaEstimate(1.0 - logconcave_cdf(fit_logconcave(z), 0.0), Method.MLE_1D)


def theta_smoothed_logconcave(z: DiffSample) -> ThetaEstimate:
    """1 - F(0) under the variance-matched smoothed log-concave density."""
    return ThetaEstimate(1.0 - smoothed_cdf(fit_smoothed(z), 0.0), Method.SMLE_1D)


def theta_kernel_2d(s: PairedSample, H: BandwidthMatrix2D) -> ThetaEstimate:
    """Mass of the bivariate Gaussian KDE on {x < y}, in closed form."""
    scale = np.sqrt(H.h11 + H.h22 - 2.0 * H.h12)
    vals = normal_cdf((s.y - s.x) / scale)
    return ThetaEstimate(float(np.mean(vals)), Method.KERNEL_2D)


def theta_kernel_2d_mc(
    s: PairedSample, H: BandwidthMatrix2D, m: int, rng: RngStream
) -> ThetaEstimate:
    """Monte Carlo companion of ``theta_kernel_2d``.

    Samples the KDE mixture directly: pick a couple uniformly, add
    H-covariance Gaussian noise, count u < v.  Standard error is about
    sqrt(theta (1 - theta) / m).
    """
    if m < 1:
        raise DomainError(f"mc sample count must be >= 1, got {m}")
    gen = rng.generator()
    idx = gen.integers(0, s.n, size=m)
    cov = np.array([[H.h11, H.h12], [H.h12, H.h22]])
    noise = gen.multivariate_normal([0.0, 0.0], cov, size=m, method="cholesky")
    u = s.x[idx] + noise[:, 0]
    v = s.y[idx] + noise[:, 1]
    return ThetaEstimate(float(np.mean(u < v)), Method.KERNEL_2D)


def _margins(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or ys.ndim != 1 or xs.size < 1 or ys.size < 1:
        raise InsufficientDataError("need at least one value per margin")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DomainError("marginal samples must be finite")
    return xs, ys


def theta_independent(
    xs, ys, hx: Bandwidth1D | None = None, hy: Bandwidth1D | None = None
) -> ThetaEstimate:
    """P(X < Y) as if the margins were independent.

    Integrates the product of the two marginal Gaussian KDEs over {x < y}:
    the double sum of Phi((y_j - x_i) / sqrt(hx^2 + hy^2)).  Margins may
    have different lengths.  Bandwidths default to the Silverman density
    rule (which needs at least two values per margin).
    """
    xs, ys = _margins(xs, ys)
    hx = hx or silverman_density_bw(xs)
    hy = hy or silverman_density_bw(ys)
    scale = np.hypot(hx.h, hy.h)
    vals = normal_cdf((ys[None, :] - xs[:, None]) / scale)
    return ThetaEstimate(float(np.mean(vals)), Method.INDEPENDENT)


def theta_independent_mc(
    xs, ys, hx: Bandwidth1D, hy: Bandwidth1D, m: int, rng: RngStream
) -> ThetaEstimate:
    """Monte Carlo companion of ``theta_independent``: sample each marginal
    KDE mixture independently and count x < y."""
    if m < 1:
        raise DomainError(f"mc sample count must be >= 1, got {m}")
    xs, ys = _margins(xs, ys)
    gen = rng.generator()
    u = xs[gen.integers(0, xs.size, size=m)] + hx.h * gen.standard_normal(m)
    v = ys[gen.integers(0, ys.size, size=m)] + hy.h * gen.standard_normal(m)
    return ThetaEstimate(float(np.mean(u < v)), Method.INDEPENDENT)


def point_estimate(sample: PairedSample, spec: EstimatorSpec) -> ThetaEstimate:
    """Run the estimator named by ``spec`` on a paired sample.

    Difference-based methods derive z internally; default bandwidths are
    recomputed from whatever sample is passed in, so bootstrap resamples
    automatically get resample-specific bandwidths.
    """
    method = spec.method
    if method == Method.ECDF:
        return theta_ecdf(differences(sample))
    if method == Method.KERNEL_1D:
        z = differences(sample)
        h = spec.bandwidth or cdf_bw(z.z)
        return theta_kernel_1d(z, h)
    if method == Method.MLE_1D:
        return theta_logconcave(differences(sample))
    if method == Method.SMLE_1D:
        return theta_smoothed_logconcave(differences(sample))
    if method == Method.KERNEL_2D:
        H = spec.bandwidth or diagonal_bw_2d(sample)
        return theta_kernel_2d(sample, H)
    if method in (Method.INDEPENDENT, Method.PAIRED):
        hx, hy = spec.bandwidth or (None, None)
        est = theta_independent(sample.x, sample.y, hx, hy)
        return replace(est, method=method)
    raise DomainError(f"unknown method {method!r}")
