"""Bootstrap resampling and confidence intervals for theta estimates.

Resampling comes in two schemes.  ``PAIRED`` draws n couple indices with
replacement, keeping each (x_i, y_i) together — the right scheme whenever
the estimator uses the dependence structure.  ``INDEPENDENT`` draws the
x-indices and y-indices separately (x first, then y, from the same
stream), which matches estimators that treat the margins as unrelated
samples; it is only compatible with those estimators.

Determinism: replicate r always consumes ``RngStream(seed, r)``, no matter
how many worker threads evaluate replicates, and results are stored by
replicate index.  A resample an estimator cannot digest (for example all
couples identical, so the differences have no spread) is retried on stream
r + attempt * B for attempt = 1, 2, ..., 100, then reported as a hard
error; retry streams cannot collide with other replicates' streams.

Intervals: Normal (bias-corrected center, +- z * sd), Basic (reflected
quantiles), Percentile (plain quantiles), and BCa (bias- and
acceleration-adjusted percentiles with leave-one-couple-out jackknife).
Replicate quantiles use linear interpolation of order statistics (the
"type 7" rule, numpy's default) everywhere.  Normal and Basic endpoints
may leave [0, 1]; they are reported unclipped with ``outside_unit`` set.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    DegenerateSampleError,
    DomainError,
    InsufficientDataError,
    Method,
    PairedSample,
    Seed,
    ThetaEstimate,
)
from .estimators import EstimatorSpec, point_estimate
from .numerics import RngStream, normal_cdf, normal_quantile

__all__ = [
    "ResamplingScheme",
    "BootstrapResult",
    "CiKind",
    "ConfidenceInterval",
    "run_bootstrap",
    "jackknife_estimates",
    "ci_normal",
    "ci_basic",
    "ci_percentile",
    "ci_bca",
    "bca_z0",
    "bca_acceleration",
    "default_scheme",
]

_MAX_RETRIES = 100


class ResamplingScheme(Enum):
    PAIRED = "PairedResample"
    INDEPENDENT = "IndependentResample"


class CiKind(Enum):
    NORMAL = "normal"
    BASIC = "basic"
    PERCENTILE = "percentile"
    BCA = "bca"


@dataclass(frozen=True)
class BootstrapResult:
    """Point estimate plus B bootstrap replicate values of theta."""

    point: ThetaEstimate
    replicates: np.ndarray
    scheme: ResamplingScheme
    seed: Seed

    def __post_init__(self) -> None:
        reps = np.asarray(self.replicates, dtype=float).copy()
        if reps.ndim != 1 or reps.size < 1:
            raise DomainError("replicates must be a nonempty 1-D array")
        if not np.all(np.isfinite(reps)):
            raise DomainError("replicates must be finite")
        if np.any(reps < 0.0) or np.any(reps > 1.0):
            raise DomainError("replicates must lie in [0, 1]")
        reps.flags.writeable = False
        object.__setattr__(self, "replicates", reps)

    @property
    def b(self) -> int:
        return int(self.replicates.size)


@dataclass(frozen=True, slots=True)
class ConfidenceInterval:
    """One interval; ``outside_unit`` flags an endpoint beyond [0, 1],
    ``accel_zeroed`` flags a BCa acceleration forced to 0 by a flat
    jackknife."""

    lo: float
    hi: float
    kind: CiKind
    level: float
    outside_unit: bool = False
    accel_zeroed: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise DomainError(f"interval must satisfy lo <= hi, got ({self.lo}, {self.hi})")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must be in (0, 1), got {self.level}")


def default_scheme(method: Method) -> ResamplingScheme:
    """Independent estimator resamples margins independently; everything
    else keeps couples intact."""
    if method == Method.INDEPENDENT:
        return ResamplingScheme.INDEPENDENT
    return ResamplingScheme.PAIRED


def _resample_indices(gen: np.random.Generator, n: int) -> np.ndarray:
    """n indices with replacement (separate hook so tests can stub it)."""
    return gen.integers(0, n, size=n)


def _check_compatible(spec: EstimatorSpec, scheme: ResamplingScheme) -> None:
    if scheme == ResamplingScheme.INDEPENDENT and spec.method not in (
        Method.INDEPENDENT,
        Method.PAIRED,
    ):
        raise DomainError(
            f"IndependentResample requires a marginal estimator, not {spec.method.value}"
        )


def _one_replicate(
    sample: PairedSample, spec: EstimatorSpec, scheme: ResamplingScheme,
    seed: Seed, r: int, b: int,
) -> float:
    n = sample.n
    for attempt in range(_MAX_RETRIES + 1):
        gen = RngStream(seed, r + attempt * b).generator()
        if scheme == ResamplingScheme.PAIRED:
            resample = sample.take(_resample_indices(gen, n))
        else:
            ix = _resample_indices(gen, n)
            iy = _resample_indices(gen, n)
            resample = PairedSample(sample.x[ix], sample.y[iy])
        try:
            return point_estimate(resample, spec).value
        except (DegenerateSampleError, InsufficientDataError):
            continue
    raise DegenerateSampleError(
        f"replicate {r}: estimator failed on {_MAX_RETRIES} retried resamples"
    )


def run_bootstrap(
    sample: PairedSample,
    spec: EstimatorSpec,
    scheme: ResamplingScheme,
    b: int,
    seed: Seed,
    *,
    threads: int = 1,
) -> BootstrapResult:
    """B bootstrap replicates of the estimator in ``spec``.

    Replicate r is computed on the resample drawn from stream r of
    ``split_streams(seed, b)``; the output is a pure function of
    (sample, spec, scheme, b, seed) regardless of ``threads``.
    """
    if b < 1:
        raise DomainError(f"B must be >= 1, got {b}")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    _check_compatible(spec, scheme)
    point = point_estimate(sample, spec)

    reps = np.empty(b, dtype=float)
    if threads == 1:
        for r in range(b):
            reps[r] = _one_replicate(sample, spec, scheme, seed, r, b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for r, value in enumerate(
                pool.map(
                    lambda r: _one_replicate(sample, spec, scheme, seed, r, b),
                    range(b),
                )
            ):
                reps[r] = value
    return BootstrapResult(point, reps, scheme, seed)


def jackknife_estimates(sample: PairedSample, spec: EstimatorSpec) -> np.ndarray:
    """Leave-one-couple-out point estimates (inputs to BCa acceleration)."""
    if sample.n < 3:
        raise InsufficientDataError("jackknife needs at least 3 couples")
    keep = np.arange(sample.n)
    return np.array([
        point_estimate(sample.take(np.delete(keep, i)), spec).value
        for i in range(sample.n)
    ])


def _check_level(level: float) -> None:
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")


def _flag(lo: float, hi: float) -> bool:
    return lo < 0.0 or hi > 1.0


def ci_normal(result: BootstrapResult, level: float) -> ConfidenceInterval:
    """Bias-corrected normal interval: 2*point - mean(reps) +- z*sd(reps)."""
    _check_level(level)
    if result.b < 2:
        raise InsufficientDataError("normal interval needs at least 2 replicates")
    center = 2.0 * result.point.value - float(np.mean(result.replicates))
    sd = float(np.std(result.replicates, ddof=1))
    if sd == 0.0:
        return ConfidenceInterval(center, center, CiKind.NORMAL, level,
                                  outside_unit=_flag(center, center))
    half = normal_quantile(1.0 - (1.0 - level) / 2.0) * sd
    lo, hi = center - half, center + half
    return ConfidenceInterval(lo, hi, CiKind.NORMAL, level, outside_unit=_flag(lo, hi))


def ci_basic(result: BootstrapResult, level: float) -> ConfidenceInterval:
    """Reflected-quantile interval (2p - q_hi, 2p - q_lo)."""
    _check_level(level)
    alpha = 1.0 - level
    q_lo, q_hi = np.quantile(result.replicates, [alpha / 2.0, 1.0 - alpha / 2.0])
    p = result.point.value
    lo, hi = 2.0 * p - float(q_hi), 2.0 * p - float(q_lo)
    return ConfidenceInterval(lo, hi, CiKind.BASIC, level, outside_unit=_flag(lo, hi))


def ci_percentile(result: BootstrapResult, level: float) -> ConfidenceInterval:
    """Plain replicate quantiles at alpha/2 and 1 - alpha/2."""
    _check_level(level)
    alpha = 1.0 - level
    q_lo, q_hi = np.quantile(result.replicates, [alpha / 2.0, 1.0 - alpha / 2.0])
    return ConfidenceInterval(float(q_lo), float(q_hi), CiKind.PERCENTILE, level)


def bca_z0(replicates: np.ndarray, point: float) -> float:
    """Bias-correction factor: the normal quantile of the fraction of
    replicates strictly below the point estimate.

    Raises
    ------
    DegenerateSampleError
        If every replicate falls on one side of the point estimate (the
        fraction would be 0 or 1); rerun with a larger B.
    """
    replicates = np.asarray(replicates, dtype=float)
    b = replicates.size
    below = int(np.sum(replicates < point))
    if below == 0 or below == b:
        raise DegenerateSampleError(
            "all bootstrap replicates fall on one side of the point estimate; "
            "the BCa bias correction is undefined — increase B"
        )
    return normal_quantile(below / b)


def bca_acceleration(jack: np.ndarray) -> tuple[float, bool]:
    """Jackknife acceleration; returns (a, zeroed) where ``zeroed`` means
    the jackknife had no spread and a was forced to 0."""
    jack = np.asarray(jack, dtype=float)
    dev = jack.mean() - jack
    den = float(np.sum(dev * dev))
    # relative cutoff: rounding in the mean leaves O(eps) deviations even
    # when every leave-one-out estimate is identical
    flat = den <= (1e-14 * max(1.0, float(np.max(np.abs(jack))))) ** 2 * jack.size
    if flat:
        return 0.0, True
    return float(np.sum(dev**3) / (6.0 * den**1.5)), False


def ci_bca(result: BootstrapResult, jack: np.ndarray, level: float) -> ConfidenceInterval:
    """Bias-corrected and accelerated percentile interval."""
    _check_level(level)
    jack = np.asarray(jack, dtype=float)
    if jack.size < 3:
        raise InsufficientDataError("BCa needs at least 3 jackknife estimates")
    z0 = bca_z0(result.replicates, result.point.value)
    a, zeroed = bca_acceleration(jack)
    alpha = 1.0 - level
    adj = []
    for z in (normal_quantile(alpha / 2.0), normal_quantile(1.0 - alpha / 2.0)):
        t = z0 + z
        adj.append(normal_cdf(z0 + t / (1.0 - a * t)))
    q_lo, q_hi = np.quantile(result.replicates, sorted(adj))
    return ConfidenceInterval(
        float(q_lo), float(q_hi), CiKind.BCA, level, accel_zeroed=zeroed
    )
