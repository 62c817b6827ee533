"""Max-moving-average field on a lattice, estimate vs the two oracles.

Simulates the indicator-ball MMA field (each site is the max of iid
Frechet noise over itself and its four neighbors), runs the lattice
estimator at a few small lags, and prints the estimate next to the
closed-form limit and the finite-threshold value it actually centers
on.  The point of the table: at q = 0.97 the estimate sits near the
finite-threshold column, not the limit column.
"""
import numpy as np

from extremogram import (
    ExtremeSet,
    Lag,
    ThresholdRule,
    WeightSpec,
    lattice_ese,
    mma1_extremogram,
    mma1_pa_extremogram,
    sim_mma,
)

ray = ExtremeSet.ray(1.0)
rule = ThresholdRule.quantile(0.97)

field = sim_mma((120, 120), WeightSpec.indicator_ball(1.0), seed=7)
lags = [Lag.of(1, 0), Lag.of(1, 1), Lag.of(2, 0), Lag.of(3, 0)]
res = lattice_ese(field, ray, ray, rule, lags)

print(f"120x120 field, threshold a_m = {res.a_m:.3f} (m = {res.m:.1f})")
print(f"{'lag':>8} {'distance':>9} {'estimate':>9} {'limit':>7} {'finite-m':>9}")
for k, lag in enumerate(res.lags):
    limit = mma1_extremogram(lag)
    pa = mma1_pa_extremogram(lag, res.m).rho_pa
    print(f"{str(tuple(int(c) for c in lag.offset)):>8} {res.distances[k]:>9.3f} "
          f"{res.rho_hat[k]:>9.3f} {limit:>7.3f} {pa:>9.3f}")

# averaging over replicates makes the centering unmistakable
reps = []
for r in range(50):
    f = sim_mma((120, 120), WeightSpec.indicator_ball(1.0), seed=100 + r)
    reps.append(lattice_ese(f, ray, ray, rule, [Lag.of(1, 0)]).rho_hat[0])
mean = float(np.mean(reps))
pa1 = mma1_pa_extremogram(Lag.of(1, 0), res.m).rho_pa
print(f"\n50-replicate mean at lag (1,0): {mean:.4f}")
print(f"limit 0.4000, finite-m value {pa1:.4f} "
      f"(|mean - finite-m| = {abs(mean - pa1):.4f})")
