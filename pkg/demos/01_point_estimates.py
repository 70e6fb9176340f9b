"""Every point estimator on one simulated paired sample.

Draws a dependent (x, y) sample from the sinh-arcsinh simulator, then runs
the full estimator roster and compares each value against the numerically
integrated truth.  The difference-based estimators see only z = y - x; the
2-D kernel works on the couples; the independence baseline deliberately
ignores the pairing, which is exactly why it lands low.
"""

from pxy.core import Method, Seed, pearson_correlation
from pxy.estimators import EstimatorSpec, point_estimate
from pxy.numerics import RngStream
from pxy.simulate import SinhArcsinhParams, sample_sas, theta_oracle

params = SinhArcsinhParams(
    sigma1=1.0, sigma2=1.0, rho=0.75, eps1=0.0, eps2=1.0, delta1=1.0, delta2=2.0
)
sample = sample_sas(params, n=100, rng=RngStream(Seed(7), 0))
truth = theta_oracle(params)

print(f"n = {sample.n} couples, sample correlation = {pearson_correlation(sample):.3f}")
print(f"true P(X < Y) by quadrature: {truth:.4f}\n")

print(f"{'method':<14}{'estimate':>10}{'error':>10}")
for method in Method:
    est = point_estimate(sample, EstimatorSpec(method))
    print(f"{est.method.label:<14}{est.value:>10.4f}{est.value - truth:>+10.4f}")

print(
    "\nThe Independent row treats the margins as unrelated samples; with"
    "\npositive dependence this underestimates theta, which is the main"
    "\nreason to model the pairing at all."
)
