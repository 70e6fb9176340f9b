"""Bivariate sinh-arcsinh data generation and ground-truth oracles.

The generator builds (X, Y) from a Gaussian copula layer: (G1, G2) is
standard bivariate normal with correlation rho, and each margin is pushed
through the sinh-arcsinh map

    sas(u) = sigma * sinh( (asinh(u) + eps) / delta ),

so eps controls skewness and delta > 1 lightens the tails.  The map is a
strictly increasing bijection of the real line with inverse
sinh(delta * asinh(t / sigma) - eps), which is what makes exact oracles
possible: the event {X < Y} pulled back to the Gaussian layer is
{G1 < sas1^{-1}(sas2(G2))}, and conditioning on G2 reduces theta to a
one-dimensional integral

    theta = E_g[ Phi( (sas1^{-1}(sas2(g)) - rho g) / sqrt(1 - rho^2) ) ]

evaluated with the package's own adaptive quadrature.  The independence
baseline is the same integral with rho = 0, and the correlation oracle
combines one-dimensional moment integrals with a nested integral for
E[XY].  No sampling is involved anywhere in the oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import DomainError, PairedSample
from .numerics import QuadratureSpec, RngStream, adaptive_quad, normal_cdf

__all__ = [
    "SinhArcsinhParams",
    "sas_transform",
    "sas_inverse",
    "sample_sas",
    "theta_oracle",
    "theta_independent_oracle",
    "correlation_oracle",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True, slots=True)
class SinhArcsinhParams:
    """Parameters (sigma1, sigma2, rho, eps1, eps2, delta1, delta2)."""

    sigma1: float
    sigma2: float
    rho: float
    eps1: float
    eps2: float
    delta1: float
    delta2: float

    def __post_init__(self) -> None:
        for name in ("sigma1", "sigma2", "delta1", "delta2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
        for name in ("eps1", "eps2"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not (math.isfinite(self.rho) and -1.0 < self.rho < 1.0):
            raise DomainError(f"rho must lie strictly inside (-1, 1), got {self.rho!r}")


def sas_transform(u, sigma: float, eps: float, delta: float):
    """sigma * sinh((asinh(u) + eps) / delta); strictly increasing in u."""
    return sigma * np.sinh((np.arcsinh(u) + eps) / delta)


def sas_inverse(t, sigma: float, eps: float, delta: float):
    """Inverse map: sinh(delta * asinh(t / sigma) - eps)."""
    return np.sinh(delta * np.arcsinh(t / sigma) - eps)


def sample_sas(p: SinhArcsinhParams, n: int, rng: RngStream) -> PairedSample:
    """n couples from the bivariate sinh-arcsinh distribution.

    The Gaussian layer is generated as g1 = n1 and
    g2 = rho n1 + sqrt(1 - rho^2) n2 from 2n standard normal draws, so the
    output is a deterministic function of the stream.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    gen = rng.generator()
    norm = gen.standard_normal((n, 2))
    g1 = norm[:, 0]
    g2 = p.rho * norm[:, 0] + math.sqrt(1.0 - p.rho * p.rho) * norm[:, 1]
    return PairedSample(
        sas_transform(g1, p.sigma1, p.eps1, p.delta1),
        sas_transform(g2, p.sigma2, p.eps2, p.delta2),
    )


def _phi(g):
    return _INV_SQRT_2PI * np.exp(-0.5 * g * g)


def theta_oracle(p: SinhArcsinhParams, tol: float = 1e-8) -> float:
    """True theta = P(X < Y) by one-dimensional adaptive quadrature.

    Conditional on the Gaussian layer's G2 = g, the event {X < Y} is
    {G1 < c(g)} with c(g) = sas1^{-1}(sas2(g)), and G1 | G2 = g is normal
    with mean rho g and variance 1 - rho^2.
    """
    if not (math.isfinite(tol) and tol > 0.0):
        raise DomainError(f"tol must be positive, got {tol!r}")
    denom = math.sqrt(1.0 - p.rho * p.rho)

    def integrand(g):
        boundary = sas_inverse(
            sas_transform(g, p.sigma2, p.eps2, p.delta2), p.sigma1, p.eps1, p.delta1
        )
        return _phi(g) * normal_cdf((boundary - p.rho * g) / denom)

    spec = QuadratureSpec(abs_tol=tol, max_subdivisions=512)
    return float(adaptive_quad(integrand, -math.inf, math.inf, spec))


def theta_independent_oracle(p: SinhArcsinhParams, tol: float = 1e-8) -> float:
    """theta for independent copies of the margins: the same quadrature
    with the copula correlation removed."""
    return theta_oracle(replace(p, rho=0.0), tol)


def _moments_1d(sigma: float, eps: float, delta: float, tol: float) -> tuple[float, float]:
    """(mean, variance) of one sinh-arcsinh margin."""
    spec = QuadratureSpec(abs_tol=tol, max_subdivisions=512)

    def m1(g):
        return _phi(g) * sas_transform(g, sigma, eps, delta)

    def m2(g):
        return _phi(g) * sas_transform(g, sigma, eps, delta) ** 2

    mean = adaptive_quad(m1, -math.inf, math.inf, spec)
    second = adaptive_quad(m2, -math.inf, math.inf, spec)
    return float(mean), float(second - mean * mean)


def correlation_oracle(p: SinhArcsinhParams, tol: float = 1e-6) -> float:
    """Pearson correlation of (X, Y), by nested adaptive quadrature.

    E[XY] = E_g[ sas2(g) * E_w[ sas1(rho g + sqrt(1-rho^2) w) ] ]; the
    inner expectation is itself a one-dimensional integral, evaluated per
    outer node at a tighter tolerance.
    """
    if not (math.isfinite(tol) and tol > 0.0):
        raise DomainError(f"tol must be positive, got {tol!r}")
    mtol = tol * 1e-2
    mean1, var1 = _moments_1d(p.sigma1, p.eps1, p.delta1, mtol)
    mean2, var2 = _moments_1d(p.sigma2, p.eps2, p.delta2, mtol)
    denom = math.sqrt(1.0 - p.rho * p.rho)
    inner_spec = QuadratureSpec(abs_tol=tol * 1e-3, max_subdivisions=512)
    outer_spec = QuadratureSpec(abs_tol=tol * 0.5, max_subdivisions=512)

    def inner(g: float) -> float:
        def f(w):
            return _phi(w) * sas_transform(
                p.rho * g + denom * w, p.sigma1, p.eps1, p.delta1
            )

        return adaptive_quad(f, -math.inf, math.inf, inner_spec)

    def outer(gs):
        gs = np.atleast_1d(np.asarray(gs, dtype=float))
        vals = np.array([inner(float(g)) for g in gs])
        return _phi(gs) * sas_transform(gs, p.sigma2, p.eps2, p.delta2) * vals

    exy = adaptive_quad(outer, -math.inf, math.inf, outer_spec)
    return float((exy - mean1 * mean2) / math.sqrt(var1 * var2))
