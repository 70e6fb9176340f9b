"""Checks for the shape-restricted (log-concave) density machinery.

The fitter is the most intricate part of the package, so the tests here
lean on independent arithmetic wherever possible: scipy quadrature for
masses and moments, and a generic bound-constrained solver on a fixed
grid (tests/oracles.py) for optimality.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from pxy.core import DegenerateSampleError, DiffSample, DomainError
from pxy.logconcave import (
    LogConcaveFit,
    SmoothedFit,
    fit_logconcave,
    fit_smoothed,
    logconcave_cdf,
    logconcave_objective,
    logconcave_variance,
    smoothed_cdf,
)

from oracles import grid_logconcave_oracle


def random_diff_sample(rng, n=None):
    n = n or int(rng.integers(10, 60))
    kind = rng.integers(0, 3)
    if kind == 0:
        return DiffSample(rng.normal(0.4, 1.3, n))
    if kind == 1:
        return DiffSample(rng.gamma(2.0, 1.0, n) - 1.5)
    return DiffSample(rng.laplace(0.0, 0.9, n))


def segment_quad(fit, g):
    """Integrate g(t) * exp(phi(t)) segment by segment with scipy."""
    total = 0.0
    for a, b in zip(fit.knots[:-1], fit.knots[1:]):
        total += quad(lambda t: g(t) * math.exp(float(fit.log_density(t))), a, b,
                      epsabs=1e-12, limit=200)[0]
    return total


class TestTwoPointFit:
    def test_uniform_phi(self):
        fit = fit_logconcave(DiffSample([-1.0, 1.0]))
        np.testing.assert_array_equal(fit.knots, [-1.0, 1.0])
        np.testing.assert_allclose(fit.phi, -math.log(2.0), rtol=0, atol=1e-6)

    def test_uniform_cdf_values(self):
        fit = fit_logconcave(DiffSample([-1.0, 1.0]))
        assert logconcave_cdf(fit, 0.0) == pytest.approx(0.5, abs=1e-6)
        assert logconcave_cdf(fit, 0.5) == pytest.approx(0.75, abs=1e-6)
        assert logconcave_cdf(fit, -1.0) == pytest.approx(0.0, abs=1e-8)
        assert logconcave_cdf(fit, 1.0) == pytest.approx(1.0, abs=1e-8)
        assert logconcave_cdf(fit, -5.0) == 0.0
        assert logconcave_cdf(fit, 5.0) == 1.0


def test_degenerate_sample_rejected():
    with pytest.raises(DegenerateSampleError):
        fit_logconcave(DiffSample([2.0, 2.0, 2.0]))


def test_fit_validation():
    with pytest.raises(DomainError):
        LogConcaveFit(np.array([0.0, 0.0]), np.array([0.0, 0.0]))  # flat knots
    with pytest.raises(DomainError):
        # convex phi: slopes increase
        LogConcaveFit(np.array([0.0, 1.0, 2.0]), np.array([0.0, -1.0, 1.0]))


def test_log_density_outside_support():
    fit = fit_logconcave(DiffSample([-1.0, 1.0]))
    assert fit.log_density(-1.5) == -np.inf
    assert fit.log_density(1.5) == -np.inf


def test_normalization_and_mean_across_shapes():
    rng = np.random.default_rng(42)
    for _ in range(8):
        z = random_diff_sample(rng)
        fit = fit_logconcave(z)
        mass = segment_quad(fit, lambda t: 1.0)
        mean = segment_quad(fit, lambda t: t)
        assert mass == pytest.approx(1.0, abs=1e-8)
        assert mean == pytest.approx(float(np.mean(z.z)), abs=1e-6)


def test_concavity_of_fitted_phi():
    rng = np.random.default_rng(42)
    for _ in range(6):
        fit = fit_logconcave(random_diff_sample(rng))
        slopes = np.diff(fit.phi) / np.diff(fit.knots)
        assert np.all(np.diff(slopes) <= 1e-9)


def test_no_concave_perturbation_improves_objective():
    rng = np.random.default_rng(42)
    z = random_diff_sample(rng, n=40)
    fit = fit_logconcave(z)
    base = logconcave_objective(z, fit.knots, fit.phi)
    k = fit.knots
    for _ in range(100):
        # random concave direction: affine part plus nonnegative kinks
        p = rng.normal() + rng.normal() * (k - k[0])
        for kink in k[1:-1]:
            p = p - rng.uniform(0.0, 1.0) * np.maximum(k - kink, 0.0)
        p = p * (1e-3 / np.max(np.abs(p)))
        perturbed = logconcave_objective(z, k, fit.phi + p)
        assert perturbed <= base + 1e-9


def test_objective_matches_grid_oracle():
    rng = np.random.default_rng(42)
    for _ in range(5):
        z = random_diff_sample(rng, n=int(rng.integers(8, 40)))
        fit = fit_logconcave(z)
        value = logconcave_objective(z, fit.knots, fit.phi)
        _, _, oracle_value = grid_logconcave_oracle(z.z)
        assert value == pytest.approx(oracle_value, abs=1e-6)
        assert value >= oracle_value - 1e-10  # grid class is a subset


def test_affine_equivariance():
    rng = np.random.default_rng(42)
    z = rng.normal(size=25)
    a, b = 2.0, 3.0
    fit = fit_logconcave(DiffSample(z))
    fit2 = fit_logconcave(DiffSample(a + b * z))
    np.testing.assert_allclose(fit2.knots[[0, -1]], a + b * fit.knots[[0, -1]],
                               rtol=0, atol=1e-12)
    for t in np.linspace(z.min(), z.max(), 9):
        assert float(fit2.log_density(a + b * t)) == pytest.approx(
            float(fit.log_density(t)) - math.log(b), abs=1e-6
        )
        assert logconcave_cdf(fit2, a + b * t) == pytest.approx(
            logconcave_cdf(fit, t), abs=1e-8
        )


def test_cdf_monotone_and_matches_quadrature():
    rng = np.random.default_rng(42)
    z = random_diff_sample(rng, n=35)
    fit = fit_logconcave(z)
    grid = np.linspace(fit.knots[0] - 0.5, fit.knots[-1] + 0.5, 60)
    vals = [logconcave_cdf(fit, t) for t in grid]
    assert np.all(np.diff(vals) >= -1e-12)
    for t in np.linspace(fit.knots[0], fit.knots[-1], 9)[1:-1]:
        clipped = LogConcaveFit(
            np.append(fit.knots[fit.knots < t], t),
            np.append(fit.phi[fit.knots < t], float(fit.log_density(t))),
        )
        expected = segment_quad(clipped, lambda u: 1.0)
        assert logconcave_cdf(fit, t) == pytest.approx(expected, abs=1e-9)


def test_variance_matches_quadrature():
    rng = np.random.default_rng(42)
    z = random_diff_sample(rng, n=30)
    fit = fit_logconcave(z)
    mean = segment_quad(fit, lambda t: t)
    second = segment_quad(fit, lambda t: t * t)
    assert logconcave_variance(fit) == pytest.approx(second - mean**2, abs=1e-8)


class TestSmoothed:
    def test_two_point_gamma2(self):
        sm = fit_smoothed(DiffSample([-1.0, 1.0]))
        # sample variance 2, uniform variance 1/3
        assert sm.gamma2 == pytest.approx(5.0 / 3.0, abs=1e-6)

    def test_gamma2_formula_and_floor(self):
        rng = np.random.default_rng(42)
        for _ in range(6):
            z = random_diff_sample(rng)
            sm = fit_smoothed(z)
            s2 = float(np.var(z.z, ddof=1))
            assert sm.gamma2 == pytest.approx(
                max(0.0, s2 - logconcave_variance(sm.base)), abs=1e-10
            )
            assert sm.gamma2 >= 0.0

    def test_zero_gamma2_reduces_to_base_cdf(self):
        fit = fit_logconcave(DiffSample(np.random.default_rng(42).normal(size=20)))
        sm = SmoothedFit(fit, 0.0)
        for t in np.linspace(fit.knots[0] - 1, fit.knots[-1] + 1, 11):
            assert smoothed_cdf(sm, t) == logconcave_cdf(fit, t)

    def test_symmetric_base_half_mass_at_zero(self):
        sm = fit_smoothed(DiffSample([-1.0, 1.0]))
        assert smoothed_cdf(sm, 0.0) == pytest.approx(0.5, abs=1e-8)

    def test_monotone_with_correct_limits(self):
        rng = np.random.default_rng(42)
        z = random_diff_sample(rng, n=25)
        sm = fit_smoothed(z)
        gamma = math.sqrt(sm.gamma2)
        lo = sm.base.knots[0] - 10.0 * gamma - 1.0
        hi = sm.base.knots[-1] + 10.0 * gamma + 1.0
        grid = np.linspace(lo, hi, 80)
        vals = [smoothed_cdf(sm, t) for t in grid]
        assert np.all(np.diff(vals) >= -1e-12)
        assert vals[0] == pytest.approx(0.0, abs=1e-9)
        assert vals[-1] == pytest.approx(1.0, abs=1e-9)

    def test_matches_direct_convolution_quadrature(self):
        rng = np.random.default_rng(42)
        z = random_diff_sample(rng, n=20)
        sm = fit_smoothed(z)
        gamma = math.sqrt(sm.gamma2)

        def convolved(t):
            total = 0.0
            for a, b in zip(sm.base.knots[:-1], sm.base.knots[1:]):
                total += quad(
                    lambda u: math.exp(float(sm.base.log_density(u)))
                    * 0.5 * math.erfc((u - t) / (gamma * math.sqrt(2.0))),
                    a, b, epsabs=1e-12, limit=200,
                )[0]
            return total

        for t in np.linspace(sm.base.knots[0], sm.base.knots[-1], 5):
            assert smoothed_cdf(sm, t) == pytest.approx(convolved(t), abs=1e-8)


def test_handles_ties_in_data():
    z = DiffSample([0.0, 0.0, 1.0, 1.0, 1.0, 2.5, -0.5])
    fit = fit_logconcave(z)
    assert segment_quad(fit, lambda t: 1.0) == pytest.approx(1.0, abs=1e-8)
    assert fit.knots[0] == -0.5 and fit.knots[-1] == 2.5
