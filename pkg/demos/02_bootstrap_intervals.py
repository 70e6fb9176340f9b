"""Bootstrap confidence intervals, all four constructions.

Resamples couples with replacement (the pairing is part of the data
generating process, so couples stay together), recomputes the estimator on
every resample, and turns the replicate distribution into Normal, Basic,
Percentile and BCa intervals.  Replicate r always comes from RNG stream r,
so the numbers below do not depend on how many threads do the work.
"""

import numpy as np

from pxy.bootstrap import (
    ci_basic,
    ci_bca,
    ci_normal,
    ci_percentile,
    default_scheme,
    jackknife_estimates,
    run_bootstrap,
)
from pxy.core import Method, Seed
from pxy.estimators import EstimatorSpec
from pxy.numerics import RngStream
from pxy.simulate import SinhArcsinhParams, sample_sas

params = SinhArcsinhParams(1.0, 1.0, 0.75, 0.0, 1.0, 1.0, 2.0)
sample = sample_sas(params, n=100, rng=RngStream(Seed(21), 0))

spec = EstimatorSpec(Method.KERNEL_1D)
result = run_bootstrap(
    sample, spec, default_scheme(spec.method), b=2000, seed=Seed(21), threads=4
)
jack = jackknife_estimates(sample, spec)

print(f"point estimate ({spec.method.label}): {result.point.value:.4f}")
print(f"B = {result.b} replicates: mean {result.replicates.mean():.4f}, "
      f"sd {result.replicates.std(ddof=1):.4f}\n")

for name, ci in [
    ("Normal", ci_normal(result, 0.95)),
    ("Basic", ci_basic(result, 0.95)),
    ("Percentile", ci_percentile(result, 0.95)),
    ("BCa", ci_bca(result, jack, 0.95)),
]:
    note = "  (endpoint outside [0, 1])" if ci.outside_unit else ""
    print(f"{name:<12}[{ci.lo:.4f}, {ci.hi:.4f}]{note}")

# a coarse text histogram of the replicate distribution
counts, edges = np.histogram(result.replicates, bins=12)
print("\nreplicate distribution:")
for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
    print(f"  {lo:.3f}-{hi:.3f} {'#' * (60 * c // counts.max())}")
