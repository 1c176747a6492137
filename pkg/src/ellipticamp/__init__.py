"""Elliptic AMP, its density evolution, and Lotka-Volterra equilibria of
large random ecosystems with elliptic interaction matrices."""

from .amp import (
    ActivationFamily,
    AMPTrace,
    amp_init,
    amp_run,
    amp_step,
    constant_activation,
    identity_activation,
    lv_activation,
    onsager_coefficient,
)
from .density_evolution import (
    AtomicLaw,
    DECovariance,
    de_extend,
    de_init,
    de_run,
    de_scalar_lv,
    sigma_sequence,
)
from .errors import DomainError
from .experiments import ExperimentConfig, __version__, run_amp_lv, run_figure
from .fixed_point import GrowthLaw, SystemSolution, solve_sigma, solve_system
from .lcp import EquilibriumResult, LCPInstance, contraction_solve, equilibrium, lemke
from .lv_stats import (
    BlockPartition,
    EmpiricalMeasure,
    LimitLaw,
    block_statistics,
    f_surv_block,
    f_surv_density,
    pi_sample,
    survival_fraction,
    wasserstein2_1d,
)
from .rand_matrix import (
    EllipticEnsemble,
    sample_antisymmetric_goe,
    sample_elliptic,
    sample_goe,
    sample_normalized_elliptic,
    spectral_norm,
)
