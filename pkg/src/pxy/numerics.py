"""Numerical kernel: normal distribution helpers, adaptive quadrature, RNG streams.

Quadrature
----------
``adaptive_quad`` is a globally adaptive Gauss–Kronrod 7/15 rule with
bisection of the worst interval, the same scheme QUADPACK's QAG uses.  The
Kronrod/Gauss difference feeds the usual scaled error estimate, intervals
live in a max-heap keyed by that estimate, and the routine stops once the
summed estimate drops below ``abs_tol``.  Infinite limits are folded to a
finite interval through

    t = x / (1 + |x|)        <=>        x = t / (1 - |t|),

with the image interval split at t = 0 where the map has a kink.  The
Kronrod nodes are strictly interior, so the endpoints t = +-1 (where the
Jacobian 1/(1-|t|)^2 blows up) are never evaluated; integrable integrands
vanish there and the mapped integrand is extended by continuity with 0.

Integrands may be vectorized (preferred, called with a float array) or
scalar; the wrapper probes once and adapts.

RNG streams
-----------
``RngStream(seed, stream_index)`` materializes an independent PCG64
generator from ``SeedSequence(seed, spawn_key=(stream_index,))``.  Streams
are reproducible functions of (seed, index) alone, so concurrent consumers
(e.g. bootstrap replicate r on stream r) produce identical results at any
parallelism degree.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .core import DomainError, NonConvergenceError, Seed

__all__ = [
    "normal_cdf",
    "normal_quantile",
    "QuadratureSpec",
    "adaptive_quad",
    "RngStream",
    "split_streams",
]


def normal_cdf(x):
    """Standard normal CDF Phi(x).

    Accepts scalars or arrays; absolute accuracy better than 1e-12
    everywhere (delegates to scipy's ndtr).
    """
    out = ndtr(x)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def normal_quantile(p):
    """Inverse standard normal CDF on the open interval (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    out = ndtri(arr)
    return float(out) if np.ndim(p) == 0 else out


@dataclass(frozen=True, slots=True)
class QuadratureSpec:
    """Accuracy contract for ``adaptive_quad``."""

    abs_tol: float = 1e-10
    max_subdivisions: int = 256

    def __post_init__(self) -> None:
        if not (math.isfinite(self.abs_tol) and self.abs_tol > 0.0):
            raise DomainError(f"abs_tol must be positive and finite, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


# 15-point Kronrod extension of 7-point Gauss-Legendre (QUADPACK qk15
# constants).  Nodes are the positive half; the rule is symmetric.
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277,
    0.381830050505119, 0.417959183673469,
])

# Full 15-node layout: [-x0, ..., -x6, 0, x6, ..., x0]
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WEIGHTS_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _normalize_integrand(f):
    """Return a function mapping float array -> float array.

    Probes ``f`` with an array once; falls back to a scalar loop if the
    integrand does not broadcast.
    """
    state = {"vectorized": None}

    def call(xs: np.ndarray) -> np.ndarray:
        if state["vectorized"] is not False:
            try:
                out = np.asarray(f(xs), dtype=float)
                if out.shape == xs.shape:
                    state["vectorized"] = True
                    return out
            except Exception:
                if state["vectorized"] is True:
                    raise
            state["vectorized"] = False
        return np.array([float(f(x)) for x in xs], dtype=float)

    return call


def _gk15(call, a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 7/15 panel on [a, b]: (estimate, error estimate)."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fv = call(center + half * _NODES)
    resk = float(_WEIGHTS_K @ fv)
    resg = float(_WEIGHTS_G @ fv)
    reskh = resk * 0.5
    resasc = float(_WEIGHTS_K @ np.abs(fv - reskh)) * abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    return resk * half, err


def _adaptive(call, intervals, spec: QuadratureSpec) -> float:
    heap = []
    total = 0.0
    total_err = 0.0
    for k, (a, b) in enumerate(intervals):
        val, err = _gk15(call, a, b)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, k, a, b, val))
    tiebreak = len(intervals)
    for _ in range(spec.max_subdivisions):
        if total_err <= spec.abs_tol:
            return total
        neg_err, _, a, b, val = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        left = _gk15(call, a, mid)
        right = _gk15(call, mid, b)
        total += left[0] + right[0] - val
        total_err += left[1] + right[1] + neg_err  # neg_err == -old_err
        heapq.heappush(heap, (-left[1], tiebreak, a, mid, left[0]))
        heapq.heappush(heap, (-right[1], tiebreak + 1, mid, b, right[0]))
        tiebreak += 2
    if total_err <= spec.abs_tol:
        return total
    raise NonConvergenceError(
        f"quadrature error estimate {total_err:.3e} above abs_tol "
        f"{spec.abs_tol:.3e} after {spec.max_subdivisions} subdivisions",
        best_estimate=total,
    )


def _fold(t: np.ndarray, call) -> np.ndarray:
    """Mapped integrand f(t/(1-|t|)) / (1-|t|)^2, zero at |t| = 1."""
    denom = 1.0 - np.abs(t)
    safe = denom > 0.0
    x = np.where(safe, t / np.where(safe, denom, 1.0), 0.0)
    vals = call(x)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.where(safe, vals / np.where(safe, denom, 1.0) ** 2, 0.0)
    return np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0) if not safe.all() else out


def adaptive_quad(f, a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Integrate ``f`` from ``a`` to ``b`` to absolute tolerance ``spec.abs_tol``.

    Parameters
    ----------
    f : callable
        Integrand; may accept and return float arrays (fast path) or plain
        scalars.
    a, b : float
        Limits; either may be infinite.  ``a`` must not exceed ``b``.
    spec : QuadratureSpec, optional
        Tolerance and subdivision budget.

    Raises
    ------
    NonConvergenceError
        If the error estimate still exceeds ``abs_tol`` after
        ``max_subdivisions`` bisections; the exception carries the best
        estimate found.
    """
    spec = spec or QuadratureSpec()
    if math.isnan(a) or math.isnan(b):
        raise DomainError("integration limits must not be NaN")
    if a > b:
        raise DomainError(f"require a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    call = _normalize_integrand(f)
    if math.isinf(a) or math.isinf(b):
        ta = -1.0 if math.isinf(a) else a / (1.0 + abs(a))
        tb = 1.0 if math.isinf(b) else b / (1.0 + abs(b))
        pieces = [(ta, 0.0), (0.0, tb)] if ta < 0.0 < tb else [(ta, tb)]
        return _adaptive(lambda t: _fold(t, call), pieces, spec)
    return _adaptive(call, [(a, b)], spec)


@dataclass(frozen=True, slots=True)
class RngStream:
    """One independent random stream, a pure function of (seed, index)."""

    seed: Seed
    stream_index: int

    def __post_init__(self) -> None:
        if not isinstance(self.seed, Seed):
            raise DomainError("seed must be a Seed instance")
        if self.stream_index < 0:
            raise DomainError(f"stream_index must be >= 0, got {self.stream_index}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed.value, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(seq))


def split_streams(seed: Seed, count: int) -> tuple[RngStream, ...]:
    """The first ``count`` streams rooted at ``seed``, in index order."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return tuple(RngStream(seed, k) for k in range(count))
