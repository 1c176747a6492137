"""Elliptic ensembles: pair correlations and where the spectrum ends.

An elliptic matrix interpolates between antisymmetric (rho = -1), i.i.d.
(rho = 0) and symmetric GOE (rho = 1) entries.  Below we check the entry
moments and then look at two spectral quantities of A = M / sqrt(n):
the operator norm, and the top eigenvalue of the symmetric part, which is
what decides whether I - A/kappa has a positive definite symmetric part.
"""

import numpy as np

from ellipticamp import EllipticEnsemble, sample_normalized_elliptic, spectral_norm
from ellipticamp.rand_matrix import symmetric_part_top_eigenvalue

for rho in (-0.7, 0.0, 0.4, 1.0):
    M = EllipticEnsemble(2, rho, seed=1).sample_batch(100_000)
    corr = np.corrcoef(M[:, 0, 1], M[:, 1, 0])[0, 1]
    print(f"rho={rho:+.1f}  var(M11)={M[:, 0, 0].var():.3f} (want {1 + rho:.1f})  corr={corr:+.3f}")

print("\n   n   rho   ||A||   lambda_max((A+A^T)/2)   sqrt(2(1+rho))")
for n in (250, 1000, 2000):
    for rho in (-0.7, 0.0, 0.4):
        A = sample_normalized_elliptic(n, rho, seed=n)
        print(
            f"{n:5d} {rho:+.1f}  {spectral_norm(A):.4f}   {symmetric_part_top_eigenvalue(A):.4f}"
            f"                  {np.sqrt(2 * (1 + rho)):.4f}"
        )
# The norm settles near 2 whatever rho is; the symmetric edge follows sqrt(2(1+rho)).
