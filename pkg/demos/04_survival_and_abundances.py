"""Equilibria of random LV systems: survival fraction and abundance law.

For each replication we sample A, solve the LCP for x*, and compare the
empirical survival fraction with gamma and the positive abundances with
the truncated-Gaussian density f_surv.
"""

import numpy as np

from ellipticamp import GrowthLaw, LimitLaw, equilibrium, sample_normalized_elliptic, solve_system
from ellipticamp.lv_stats import f_surv_density, f_surv_sample, histogram, wasserstein2_1d
from ellipticamp.rng import derive_seed

n, kappa, rho, reps = 200, 2.0, 0.4, 200
law = GrowthLaw.constant(1.0)
sol = solve_system(kappa, rho, law)
limit = LimitLaw(sol, law)

X = np.array(
    [
        equilibrium(sample_normalized_elliptic(n, rho, derive_seed(3, i)), kappa, np.ones(n), gate="symmetric").x_star
        for i in range(reps)
    ]
)
surv = (X > 0).mean(axis=1)
print(f"gamma theory {sol.gamma:.4f}   Monte Carlo {surv.mean():.4f} +- {surv.std(ddof=1) / np.sqrt(reps):.4f}")

pos = X[X > 0]
dens, edges = histogram(pos)
mid = 0.5 * (edges[1:] + edges[:-1])
print("\n   y     histogram  f_surv")
for y, d in list(zip(mid, dens))[:: max(1, len(mid) // 12)]:
    print(f"{y:6.3f}   {d:.3f}     {f_surv_density(limit, y):.3f}")
print(f"\nW2(positive abundances, f_surv) = {wasserstein2_1d(pos, f_surv_sample(limit, 10**6, 0)):.4f}")
