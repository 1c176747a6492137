"""Limit laws of equilibrium abundances and the empirical statistics
compared against them.

With ``(delta, sigma, gamma)`` solving the fixed-point system and
``Z`` standard normal, the limiting law of an equilibrium abundance is

    pi = law of (kappa/delta) (sigma Z + r)_+
       = gamma f_surv(y) dy + (1 - gamma) delta_0,

and in a block model with block laws ``r_j`` the same holds per block with
``gamma_j = P(sigma Z + r_j > 0)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DimensionMismatchError, InvalidInputError, InvalidParameterError
from .fixed_point import GrowthLaw, SystemSolution, normal_pdf, q_tail
from .rng import stream


@dataclass(frozen=True)
class BlockPartition:
    """Consecutive index blocks of sizes ``n_1, ..., n_q``."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise InvalidParameterError("block sizes must be positive integers")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def from_fractions(cls, n, fractions):
        """Largest-remainder rounding of ``n * fractions`` so sizes sum to ``n``."""
        fr = np.asarray(fractions, dtype=float)
        if np.any(fr <= 0) or abs(fr.sum() - 1) > 1e-12:
            raise InvalidParameterError("fractions must be positive and sum to 1")
        raw = n * fr
        sizes = np.floor(raw).astype(int)
        short = n - sizes.sum()
        # stable sort keeps lower block index first on equal remainders
        order = np.argsort(-(raw - sizes), kind="stable")
        sizes[order[:short]] += 1
        return cls(tuple(sizes.tolist()))

    @property
    def n(self):
        return sum(self.sizes)

    @property
    def q(self):
        return len(self.sizes)

    @property
    def proportions(self):
        return np.asarray(self.sizes, dtype=float) / self.n

    def slices(self):
        edges = np.concatenate([[0], np.cumsum(self.sizes)])
        return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]

    def expand(self, per_block):
        """Length-``n`` vector holding ``per_block[j]`` on block ``j``."""
        return np.repeat(np.asarray(per_block, dtype=float), self.sizes)


@dataclass(frozen=True)
class EmpiricalMeasure:
    values: np.ndarray

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float).ravel())
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("empirical measure has non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def size(self):
        return self.values.size

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class LimitLaw:
    """``pi`` for a solved system and a growth law (global or one block's)."""

    solution: SystemSolution
    growth: GrowthLaw

    @property
    def scale(self):
        return self.solution.kappa / self.solution.delta

    @property
    def sigma(self):
        return self.solution.sigma

    @property
    def survival(self):
        """``P(sigma Z + r > 0)`` under this law's growth rates."""
        return float(self.growth.w @ q_tail(-self.growth.r / self.sigma))

    def block(self, growth):
        return LimitLaw(self.solution, growth)


def _as_measure(x):
    return x if isinstance(x, EmpiricalMeasure) else EmpiricalMeasure(x)


def pi_sample(law, m, seed, role="limit"):
    """``m`` i.i.d. draws of ``(kappa/delta)(sigma Z + r)_+``."""
    if int(m) != m or m < 1:
        raise InvalidParameterError(f"m must be a positive integer, got {m!r}")
    rng = stream(seed, role, 0)
    r = rng.choice(law.growth.r, size=int(m), p=law.growth.w)
    z = rng.standard_normal(int(m))
    return law.scale * np.maximum(law.sigma * z + r, 0.0)


def f_surv_sample(law, m, seed, role="limit"):
    """``m`` i.i.d. draws from ``f_surv`` by inverse-CDF truncated normals.

    Atom ``r_i`` is chosen with probability ``w_i Q(-r_i/sigma) / gamma``,
    then ``sigma Z + r_i`` is drawn conditioned to be positive.
    """
    if int(m) != m or m < 1:
        raise InvalidParameterError(f"m must be a positive integer, got {m!r}")
    rng = stream(seed, role, 1)
    r, w, s = law.growth.r, law.growth.w, law.sigma
    p_pos = w * q_tail(-r / s)
    if not p_pos.sum() > 0:
        raise InvalidParameterError("law has no surviving mass")
    ri = rng.choice(r, size=int(m), p=p_pos / p_pos.sum())
    lo = ndtr(-ri / s)  # P(Z <= -r/sigma)
    u = lo + (1.0 - lo) * rng.uniform(size=int(m))
    z = ndtri(np.minimum(u, np.nextafter(1.0, 0.0)))
    return law.scale * np.maximum(s * z + ri, 0.0)


def f_surv_density(law, y):
    """Density of the positive part of ``pi`` (normalised by ``gamma``)."""
    y = np.asarray(y, dtype=float)
    d_over_k = 1.0 / law.scale
    s = law.sigma
    t = d_over_k * y
    mix = np.sum(
        law.growth.w[:, None] * normal_pdf((t.reshape(1, -1) - law.growth.r[:, None]) / s) / s,
        axis=0,
    ).reshape(y.shape)
    out = np.where(y > 0, d_over_k * mix / law.survival, 0.0)
    return out if out.ndim else float(out)


def f_surv_block(law, growth_j, y):
    """``f^j_surv``: the same construction with block ``j``'s growth law."""
    return f_surv_density(law.block(growth_j), y)


def block_laws(solution, partition, block_growth):
    """Per-block limit laws and the global mixture law."""
    if len(block_growth) != partition.q:
        raise DimensionMismatchError("one growth law per block is required")
    glob = GrowthLaw.mixture(block_growth, partition.proportions)
    law = LimitLaw(solution, glob)
    return law, [law.block(g) for g in block_growth]


def mixture_identity(partition, law, blocks):
    """``sum_j c_j gamma_j / gamma`` (equals 1)."""
    c = partition.proportions
    return float(sum(cj * b.survival for cj, b in zip(c, blocks)) / law.survival)


def survival_fraction(x_star, eps=0.0):
    """Fraction of entries strictly above ``eps``."""
    if eps < 0:
        raise InvalidParameterError("eps must be nonnegative")
    x = np.asarray(x_star, dtype=float)
    if x.size == 0:
        raise InvalidInputError("empty abundance vector")
    return float(np.count_nonzero(x > eps)) / x.size


def _quantiles_at(v, p):
    """Left-continuous quantile function of the empirical law of sorted ``v``."""
    idx = np.ceil(p * v.size).astype(np.int64) - 1
    return v[np.clip(idx, 0, v.size - 1)]


def wasserstein2_1d(a, b, method="grid"):
    """Wasserstein-2 distance between two empirical measures on the line.

    Equal sizes use the sorted coupling exactly.  For unequal sizes
    ``method="grid"`` evaluates both quantile functions at the midpoints
    of ``max(m_a, m_b)`` equal cells; ``method="exact"`` integrates the
    squared quantile gap over the merged breakpoints.
    """
    a, b = _as_measure(a), _as_measure(b)
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("Wasserstein distance of an empty measure")
    va, vb = a.values, b.values
    if va.size == vb.size:
        return float(np.sqrt(np.mean((va - vb) ** 2)))
    if method == "grid":
        m = max(va.size, vb.size)
        p = (np.arange(m) + 0.5) / m
        return float(np.sqrt(np.mean((_quantiles_at(va, p) - _quantiles_at(vb, p)) ** 2)))
    if method == "exact":
        # both quantile functions are constant between consecutive breakpoints
        edges = np.union1d(np.arange(va.size + 1) / va.size, np.arange(vb.size + 1) / vb.size)
        mid = 0.5 * (edges[1:] + edges[:-1])
        gap = _quantiles_at(va, mid) - _quantiles_at(vb, mid)
        return float(np.sqrt(np.sum(np.diff(edges) * gap**2)))
    raise InvalidParameterError(f"unknown method {method!r}")


def block_statistics(x_star, partition, eps=0.0):
    """Per block: survival fraction and the measure of positive entries."""
    x = np.asarray(x_star, dtype=float)
    if x.shape != (partition.n,):
        raise DimensionMismatchError(f"vector of length {x.size} vs partition of {partition.n}")
    out = []
    for sl in partition.slices():
        xb = x[sl]
        out.append((survival_fraction(xb, eps), EmpiricalMeasure(xb[xb > eps])))
    return out


def histogram(values, bins="fd", range=None):
    """Density histogram; Freedman-Diaconis bins by default."""
    values = np.asarray(values, dtype=float)
    edges = np.histogram_bin_edges(values, bins=bins, range=range)
    dens, edges = np.histogram(values, bins=edges, density=True)
    return dens, edges
