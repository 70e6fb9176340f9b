import math

import numpy as np
import pytest

from pxy.core import DomainError, Seed, pearson_correlation
from pxy.numerics import RngStream
from pxy.simulate import (
    SinhArcsinhParams,
    correlation_oracle,
    sample_sas,
    sas_inverse,
    sas_transform,
    theta_independent_oracle,
    theta_oracle,
)

REF_PARAMS = SinhArcsinhParams(1.0, 1.0, 0.75, 0.0, 1.0, 1.0, 2.0)

# Oracle values for the parameter set above, frozen from high-tolerance runs
# of the quadrature below and cross-checked by brute-force Monte Carlo.
THETA_TRUE = 0.7833415714
THETA_INDEP_TRUE = 0.6928158939
CORR_TRUE = 0.7433932820


def test_param_validation():
    with pytest.raises(DomainError):
        SinhArcsinhParams(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        SinhArcsinhParams(1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0)  # |rho| = 1
    with pytest.raises(DomainError):
        SinhArcsinhParams(1.0, 1.0, 0.0, 0.0, 0.0, 1.0, -2.0)


def test_transform_identity_case():
    u = np.linspace(-3.0, 3.0, 13)
    np.testing.assert_allclose(sas_transform(u, 1.0, 0.0, 1.0), u, rtol=0, atol=1e-15)


def test_transform_pinned_value():
    assert sas_transform(0.0, 1.0, 1.0, 2.0) == pytest.approx(
        0.5210953054937474, abs=1e-15
    )
    assert sas_transform(0.0, 1.0, 1.0, 2.0) == pytest.approx(math.sinh(0.5))


def test_transform_monotone():
    u = np.linspace(-6.0, 6.0, 200)
    out = sas_transform(u, 1.3, -0.4, 1.7)
    assert np.all(np.diff(out) > 0.0)


def test_transform_inverse_round_trip():
    u = np.linspace(-10.0, 10.0, 81)
    for sigma, eps, delta in [(1.0, 0.0, 1.0), (2.0, 1.0, 2.0), (0.5, -0.7, 1.3)]:
        t = sas_transform(u, sigma, eps, delta)
        back = sas_inverse(t, sigma, eps, delta)
        np.testing.assert_allclose(back, u, rtol=1e-10, atol=1e-10)


class TestSampling:
    def test_deterministic(self):
        a = sample_sas(REF_PARAMS, 50, RngStream(Seed(4), 0))
        b = sample_sas(REF_PARAMS, 50, RngStream(Seed(4), 0))
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, b.y)

    def test_gaussian_special_case(self):
        p = SinhArcsinhParams(1.0, 1.0, 0.6, 0.0, 0.0, 1.0, 1.0)
        s = sample_sas(p, 50_000, RngStream(Seed(4), 1))
        # identity margins: moments of a standard bivariate normal
        assert np.mean(s.x) == pytest.approx(0.0, abs=0.02)
        assert np.std(s.x, ddof=1) == pytest.approx(1.0, abs=0.02)
        assert pearson_correlation(s) == pytest.approx(0.6, abs=0.02)

    def test_large_sample_correlation_near_anchor(self):
        s = sample_sas(REF_PARAMS, 100_000, RngStream(Seed(4), 2))
        assert pearson_correlation(s) == pytest.approx(CORR_TRUE, abs=0.02)


class TestThetaOracle:
    def test_identical_margins_give_half(self):
        p = SinhArcsinhParams(1.5, 1.5, 0.4, 0.3, 0.3, 1.2, 1.2)
        assert theta_oracle(p) == pytest.approx(0.5, abs=1e-8)

    def test_reference_params_anchor(self):
        val = theta_oracle(REF_PARAMS)
        assert val == pytest.approx(0.78, abs=0.005)
        assert val == pytest.approx(THETA_TRUE, abs=1e-8)

    def test_matches_monte_carlo(self):
        val = theta_oracle(REF_PARAMS)
        s = sample_sas(REF_PARAMS, 2_000_000, RngStream(Seed(4), 3))
        mc = float(np.mean(s.x < s.y))
        se = math.sqrt(val * (1.0 - val) / s.n)
        assert abs(mc - val) < 3.0 * se

    def test_raising_skewness_of_y_does_not_decrease_theta(self):
        last = 0.0
        for eps2 in (0.0, 0.5, 1.0, 1.5):
            p = SinhArcsinhParams(1.0, 1.0, 0.75, 0.0, eps2, 1.0, 2.0)
            val = theta_oracle(p)
            assert val >= last - 1e-10
            last = val


class TestIndependentOracle:
    def test_identical_margins(self):
        p = SinhArcsinhParams(2.0, 2.0, 0.7, -0.4, -0.4, 1.5, 1.5)
        assert theta_independent_oracle(p) == pytest.approx(0.5, abs=1e-8)

    def test_equals_theta_oracle_at_rho_zero(self):
        p = SinhArcsinhParams(1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 2.0)
        assert theta_independent_oracle(REF_PARAMS) == pytest.approx(
            theta_oracle(p), abs=1e-9
        )

    def test_reference_params_anchor(self):
        val = theta_independent_oracle(REF_PARAMS)
        assert val == pytest.approx(THETA_INDEP_TRUE, abs=1e-8)


class TestCorrelationOracle:
    def test_gaussian_case_returns_rho(self):
        p = SinhArcsinhParams(1.0, 2.0, 0.35, 0.0, 0.0, 1.0, 1.0)
        assert correlation_oracle(p) == pytest.approx(0.35, abs=1e-6)

    def test_reference_params_anchor(self):
        val = correlation_oracle(REF_PARAMS)
        assert val == pytest.approx(0.743, abs=0.005)
        assert val == pytest.approx(CORR_TRUE, abs=1e-6)

    def test_label_swap_symmetry(self):
        p = SinhArcsinhParams(1.0, 2.0, 0.5, 0.3, -0.2, 1.4, 1.1)
        q = SinhArcsinhParams(2.0, 1.0, 0.5, -0.2, 0.3, 1.1, 1.4)
        assert correlation_oracle(p) == pytest.approx(correlation_oracle(q), abs=1e-6)
