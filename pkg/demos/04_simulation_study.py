"""A miniature version of the simulated comparison study.

Repeats the whole pipeline over many seeds at two sample sizes and tabulates
mean absolute error per estimator against the quadrature ground truth.  The
difference-aware estimators tighten as n grows; the independence baseline
converges to the wrong number no matter how large n gets, because its target
really is a different functional.
"""

import numpy as np

from pxy.core import Method, Seed
from pxy.estimators import EstimatorSpec, point_estimate
from pxy.numerics import RngStream
from pxy.simulate import (
    SinhArcsinhParams,
    sample_sas,
    theta_independent_oracle,
    theta_oracle,
)

params = SinhArcsinhParams(1.0, 1.0, 0.75, 0.0, 1.0, 1.0, 2.0)
truth = theta_oracle(params)
indep_target = theta_independent_oracle(params)
print(f"true theta = {truth:.4f}; independence-baseline target = {indep_target:.4f}\n")

methods = list(Method)
sizes = (50, 400)
seeds = 60

table = {m: {n: [] for n in sizes} for m in methods}
for i in range(seeds):
    for j, n in enumerate(sizes):
        s = sample_sas(params, n, RngStream(Seed(4040), 2 * i + j))
        for m in methods:
            err = point_estimate(s, EstimatorSpec(m)).value - truth
            table[m][n].append(err)

header = f"{'method':<14}" + "".join(f"{'MAE n=' + str(n):>12}" for n in sizes)
print(header)
for m in methods:
    row = f"{m.label:<14}"
    for n in sizes:
        row += f"{np.mean(np.abs(table[m][n])):>12.4f}"
    print(row)

print(
    "\nNote how the Independent/Paired rows stall near "
    f"|{indep_target:.3f} - {truth:.3f}| = {abs(indep_target - truth):.3f}: "
    "that gap is the cost of assuming away the dependence."
)
