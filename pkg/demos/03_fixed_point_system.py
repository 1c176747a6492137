"""The (delta, sigma, gamma) system as kappa and rho vary.

gamma is the limiting fraction of surviving species.  Interaction
symmetry (rho > 0) lowers it; antisymmetry (rho < 0) raises it.
"""

import warnings

import numpy as np

from ellipticamp import GrowthLaw, solve_system
from ellipticamp.fixed_point import stability_threshold

law = GrowthLaw.constant(1.0)
print("kappa   " + "  ".join(f"gamma(rho={r:+.1f})" for r in (-0.7, 0.0, 0.4, 1.0)))
for kappa in np.linspace(1.5, 5, 8):
    cells = []
    for rho in (-0.7, 0.0, 0.4, 1.0):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = solve_system(kappa, rho, law).gamma
        mark = "*" if kappa <= stability_threshold(rho) else " "
        cells.append(f"{g:.4f}{mark}         ")
    print(f"{kappa:.2f}    " + "".join(cells))
print("* kappa below sqrt(2(1+rho)): solvable, but no stable equilibrium is guaranteed")
