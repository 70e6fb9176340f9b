"""Core sample containers and summary statistics.

Everything downstream (kernel estimators, the log-concave fitter, the
bootstrap) consumes the two immutable containers defined here:

``PairedSample``
    n couples (x_i, y_i) observed together.  The pairing is meaningful:
    resampling schemes and the difference transform both rely on couple
    identity, so the container never reorders or deduplicates.

``DiffSample``
    The derived differences z_i = y_i - x_i, used by every estimator that
    works through the distribution of Z = Y - X.

Values are validated once at construction (finite, real, minimum length)
so numerical code can assume clean input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "PxyError",
    "InsufficientDataError",
    "DegenerateSampleError",
    "DomainError",
    "DataFormatError",
    "NonConvergenceError",
    "Method",
    "Seed",
    "PairedSample",
    "DiffSample",
    "ThetaEstimate",
    "differences",
    "sample_sd",
    "pearson_correlation",
]


class PxyError(Exception):
    """Base class for all errors raised by this package."""


class InsufficientDataError(PxyError):
    """Fewer observations than the operation needs."""


class DegenerateSampleError(PxyError):
    """Sample has no spread where spread is required (e.g. zero variance)."""


class DomainError(PxyError):
    """Argument outside the mathematical domain of the operation."""


class DataFormatError(PxyError):
    """Malformed input data (CSV parsing, shape mismatches)."""


class NonConvergenceError(PxyError):
    """An iterative numerical routine failed to reach its tolerance.

    Carries the best estimate found so far in ``best_estimate`` so callers
    can decide whether the partial answer is still usable.
    """

    def __init__(self, message: str, best_estimate: float | None = None):
        super().__init__(message)
        self.best_estimate = best_estimate


class Method(Enum):
    """Estimator roster for theta = P(X < Y).

    The values double as the CLI spelling of each estimator.
    """

    ECDF = "ecdf"
    KERNEL_1D = "kernel1d"
    MLE_1D = "mle1d"
    SMLE_1D = "smle1d"
    KERNEL_2D = "kernel2d"
    INDEPENDENT = "independent"
    PAIRED = "paired"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Method.ECDF: "ECDF",
    Method.KERNEL_1D: "Kernel 1D",
    Method.MLE_1D: "MLE 1D",
    Method.SMLE_1D: "SMLE 1D",
    Method.KERNEL_2D: "Kernel 2D",
    Method.INDEPENDENT: "Independent",
    Method.PAIRED: "Paired",
}


@dataclass(frozen=True, slots=True)
class Seed:
    """Root seed for any randomized routine.

    Must fit in an unsigned 64-bit integer so it can feed a seed sequence
    directly.
    """

    value: int

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise DomainError(f"seed must be an int, got {type(self.value).__name__}")
        if not 0 <= self.value < 2**64:
            raise DomainError(f"seed must be in [0, 2^64), got {self.value}")


def _as_clean_vector(values, *, name: str, min_len: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DataFormatError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise InsufficientDataError(
            f"{name} needs at least {min_len} observations, got {arr.size}"
        )
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise DataFormatError(f"{name}[{bad}] is not finite: {arr[bad]!r}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PairedSample:
    """n couples (x_i, y_i) observed together.

    Parameters
    ----------
    x, y : array_like of float
        Equal-length vectors of paired observations, at least two couples.
        Stored as read-only float arrays.

    Notes
    -----
    Couple order is preserved exactly; index i always refers to the same
    couple across ``x``, ``y`` and any derived quantity.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = _as_clean_vector(self.x, name="x", min_len=2)
        y = _as_clean_vector(self.y, name="y", min_len=2)
        if x.size != y.size:
            raise DataFormatError(
                f"x and y must have equal length, got {x.size} and {y.size}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs) -> "PairedSample":
        """Build from an iterable of (x, y) couples."""
        arr = np.asarray(list(pairs), dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DataFormatError(
                f"pairs must be a sequence of 2-tuples, got shape {arr.shape}"
            )
        return cls(arr[:, 0], arr[:, 1])

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def pairs(self) -> np.ndarray:
        """(n, 2) read-only array of couples in original order."""
        out = np.column_stack([self.x, self.y])
        out.flags.writeable = False
        return out

    def take(self, indices) -> "PairedSample":
        """New sample keeping couples at ``indices`` (with repetition allowed)."""
        idx = np.asarray(indices, dtype=np.intp)
        return PairedSample(self.x[idx], self.y[idx])


@dataclass(frozen=True)
class DiffSample:
    """Differences z_i = y_i - x_i of a paired sample."""

    z: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", _as_clean_vector(self.z, name="z", min_len=2))

    @property
    def n(self) -> int:
        return int(self.z.size)


def differences(sample: PairedSample) -> DiffSample:
    """Difference transform z_i = y_i - x_i, couple by couple.

    Each z_i is the exact floating-point subtraction y_i - x_i; no
    reordering, rounding or deduplication happens here.
    """
    return DiffSample(sample.y - sample.x)


@dataclass(frozen=True, slots=True)
class ThetaEstimate:
    """A point estimate of theta = P(X < Y), tagged with its method."""

    value: float
    method: Method

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise DomainError(f"theta estimate must be finite, got {self.value!r}")
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"theta estimate must lie in [0, 1], got {self.value!r}")


def sample_sd(values) -> float:
    """Sample standard deviation with the n-1 denominator.

    Raises
    ------
    InsufficientDataError
        If fewer than two values are supplied.
    """
    arr = _as_clean_vector(values, name="values", min_len=2)
    return float(np.sqrt(np.sum((arr - arr.mean()) ** 2) / (arr.size - 1)))


def pearson_correlation(sample: PairedSample) -> float:
    """Sample Pearson correlation of the couples.

    Returns a value clamped to [-1, 1] (guards against last-bit float
    excursions on exactly collinear data).

    Raises
    ------
    DegenerateSampleError
        If either margin has zero variance.
    """
    x, y = sample.x, sample.y
    dx = x - x.mean()
    dy = y - y.mean()
    ssx = float(np.sum(dx * dx))
    ssy = float(np.sum(dy * dy))
    if ssx == 0.0 or ssy == 0.0:
        raise DegenerateSampleError("correlation undefined: a margin has zero variance")
    r = float(np.sum(dx * dy) / math.sqrt(ssx * ssy))
    return min(1.0, max(-1.0, r))
