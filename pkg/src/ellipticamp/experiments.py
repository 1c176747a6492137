"""Reproducible experiments: configs, Monte Carlo fan-out and CSV output.

Every replication draws its matrix (and growth vector, when random) from
streams keyed by ``derive_seed(master, index)``, so results depend only
on the config and seed, never on the number of worker processes.
"""

import csv
import dataclasses
import hashlib
import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

from .amp import amp_run, lv_activation
from .density_evolution import de_scalar_lv, sigma_sequence
from .errors import InvalidParameterError
from .fixed_point import GrowthLaw, solve_system, stability_threshold
from .lcp import GATES, equilibrium
from .lv_stats import (
    BlockPartition,
    LimitLaw,
    block_laws,
    block_statistics,
    f_surv_density,
    f_surv_sample,
    histogram,
    mixture_identity,
    pi_sample,
    survival_fraction,
    wasserstein2_1d,
)
from .rand_matrix import sample_normalized_elliptic, spectral_norm, symmetric_part_top_eigenvalue
from .rng import derive_seed, stream

__version__ = "0.1.0"

OUTPUT_ENV = "ELLIPTICAMP_OUTPUT_DIR"
FIGURES = ("prop", "dist", "truncdist", "exchangeability")
EPS_ALT = 1e-6
CURVE_POINTS = 400
GRID_STEPS = 25
GRID_TOP = 5.0


def _law_field(default):
    return field(default_factory=lambda: GrowthLaw.constant(default))


@dataclass
class ExperimentConfig:
    """Scenario description; round-trips through JSON.

    ``block_fractions``/``block_growth`` switch on the block model, in
    which case ``growth`` is ignored.  ``kappa_grid=None`` means the
    default grid ``[sqrt(2(1+rho)) + 0.05, 5]`` in 25 steps per ``rho``.
    """

    scenario: str = "custom"
    n: int = 200
    kappa: float = 2.0
    rho: float = 0.0
    growth: GrowthLaw = _law_field(1.0)
    block_fractions: Optional[tuple] = None
    block_growth: Optional[tuple] = None
    replications: int = 100
    seed: Optional[int] = None
    K: int = 10
    rhos: tuple = (-0.7, 0.0, 0.4)
    kappa_grid: Optional[tuple] = None
    gate: str = "symmetric"
    limit_samples: int = 1_000_000
    output_dir: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.growth, dict):
            self.growth = GrowthLaw.from_dict(self.growth)
        if self.block_growth is not None:
            self.block_growth = tuple(
                GrowthLaw.from_dict(g) if isinstance(g, dict) else g for g in self.block_growth
            )
        if self.block_fractions is not None:
            self.block_fractions = tuple(float(c) for c in self.block_fractions)
        if self.kappa_grid is not None:
            self.kappa_grid = tuple(float(k) for k in self.kappa_grid)
        self.rhos = tuple(float(r) for r in self.rhos)
        self.validate()

    def validate(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        if not self.kappa > 0:
            raise InvalidParameterError(f"kappa must be positive, got {self.kappa}")
        for rho in (self.rho,) + self.rhos:
            if not -1.0 <= rho <= 1.0:
                raise InvalidParameterError(f"rho must lie in [-1, 1], got {rho}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise InvalidParameterError("replications must be a positive integer")
        if int(self.K) != self.K or self.K < 1:
            raise InvalidParameterError("K must be a positive integer")
        if self.seed is not None and (int(self.seed) != self.seed or self.seed < 0):
            raise InvalidParameterError("seed must be a nonnegative integer")
        if self.gate not in GATES:
            raise InvalidParameterError(f"gate must be one of {GATES}")
        if self.limit_samples < 1 or self.workers < 1:
            raise InvalidParameterError("limit_samples and workers must be positive")
        if (self.block_fractions is None) != (self.block_growth is None):
            raise InvalidParameterError("block_fractions and block_growth go together")
        if self.block_fractions is not None:
            if len(self.block_fractions) != len(self.block_growth):
                raise InvalidParameterError("one growth law per block is required")
            self.partition()

    def partition(self):
        if self.block_fractions is None:
            return None
        return BlockPartition.from_fractions(self.n, self.block_fractions)

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["growth"] = self.growth.to_dict()
        if self.block_growth is not None:
            d["block_growth"] = [g.to_dict() for g in self.block_growth]
        for key in ("block_fractions", "kappa_grid", "rhos"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())

    def config_hash(self):
        """SHA-256 over the fields that affect results."""
        d = self.to_dict()
        d.pop("output_dir")
        d.pop("workers")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def resolved_output_dir(self):
        return Path(self.output_dir or os.environ.get(OUTPUT_ENV) or "results")

    def require_seed(self):
        if self.seed is None:
            raise InvalidParameterError("a seed is required for stochastic experiments")
        return int(self.seed)


def default_kappa_grid(rho, steps=GRID_STEPS, top=GRID_TOP):
    return np.linspace(stability_threshold(rho) + 0.05, top, steps)


def _kappas(cfg, rho):
    return np.asarray(cfg.kappa_grid) if cfg.kappa_grid is not None else default_kappa_grid(rho)


def growth_vector(law, n, seed):
    """Deterministic for a one-atom law, otherwise i.i.d. draws keyed by ``seed``."""
    if len(law.values) == 1:
        return np.full(n, law.values[0])
    return stream(seed, "growth").choice(law.r, size=n, p=law.w)


def _model_growth(cfg, seed):
    part = cfg.partition()
    if part is None:
        return growth_vector(cfg.growth, cfg.n, seed)
    return np.concatenate(
        [growth_vector(g, s, derive_seed(seed, j)) for j, (g, s) in enumerate(zip(cfg.block_growth, part.sizes))]
    )


def _solve_quiet(kappa, rho, law):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return solve_system(kappa, rho, law)


def _map_ordered(fn, jobs, workers):
    """``[fn(j) for j in jobs]``, possibly in worker processes, in job order."""
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


# --- the AMP pipeline for Lotka-Volterra --------------------------------------

AMP_COLUMNS = (
    "k",
    "var_u",
    "theta2",
    "rel_err",
    "onsager",
    "survival_proxy",
    "sigma_k",
    "w2_sigma_k",
    "w2_limit",
)


def run_amp_lv(cfg):
    """Run AMP for the LV equilibrium and compare with density evolution.

    Row ``k`` describes ``u^k``: its empirical variance against
    ``theta_k^2``, the Onsager coefficient ``rho <h'>`` that entered its
    step, the fraction with ``u^k + a > 0``, and Wasserstein-2 distances
    from the empirical law of ``(u^k + a)_+`` to ``pi`` evaluated at
    ``sigma_k`` and at the fixed point ``sigma``.
    """
    seed = cfg.require_seed()
    law = cfg.growth
    sol = solve_system(cfg.kappa, cfg.rho, law)
    scale = sol.scale
    r = growth_vector(law, cfg.n, seed)
    a = scale * r
    A = sample_normalized_elliptic(cfg.n, cfg.rho, seed)
    fam = lv_activation(sol.delta)
    trace = amp_run(A, a, np.ones(cfg.n), fam, cfg.rho, cfg.K)
    theta = de_scalar_lv(sol.delta, law.scaled(scale), cfg.K).theta
    sig = sigma_sequence(theta, sol.delta, cfg.kappa)
    m = cfg.limit_samples
    limit = pi_sample(LimitLaw(sol, law), m, seed)
    rows = []
    for k in range(1, cfg.K + 1):
        u = trace.iterate(k)
        pos = np.maximum(u + a, 0.0)
        law_k = LimitLaw(dataclasses.replace(sol, sigma=float(sig[k - 1])), law)
        var = float(np.var(u))
        rows.append(
            {
                "k": k,
                "var_u": var,
                "theta2": float(theta[k - 1] ** 2),
                "rel_err": float(abs(var - theta[k - 1] ** 2) / theta[k - 1] ** 2),
                "onsager": cfg.rho * float(trace.d[k - 1]),
                "survival_proxy": float(np.mean(u + a > 0)),
                "sigma_k": float(sig[k - 1]),
                "w2_sigma_k": wasserstein2_1d(pos, pi_sample(law_k, m, seed)),
                "w2_limit": wasserstein2_1d(pos, limit),
            }
        )
    return rows


# --- Monte Carlo replications ------------------------------------------------


def _prop_replication(args):
    seed, n, rho, law, kappas, gate = args
    A = sample_normalized_elliptic(n, rho, seed)
    r = growth_vector(law, n, seed)
    norm = spectral_norm(A)
    top = symmetric_part_top_eigenvalue(A) if gate == "symmetric" else None
    out = np.empty((len(kappas), 3))
    for i, kappa in enumerate(kappas):
        res = equilibrium(A, kappa, r, gate=gate, norm=norm, sym_top=top)
        out[i] = (survival_fraction(res.x_star), survival_fraction(res.x_star, EPS_ALT), res.gate_passed)
    return out


def _equilibrium_replication(args):
    seed, n, rho, kappa, r_fn, gate = args
    A = sample_normalized_elliptic(n, rho, seed)
    r = r_fn(seed)
    return equilibrium(A, kappa, r, gate=gate).x_star


class _CfgGrowth:
    """Picklable ``seed -> growth vector`` for a config."""

    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, seed):
        return _model_growth(self.cfg, seed)


def mc_standard_error(samples, p_theory, count):
    """Empirical SE of the replication mean, floored by the binomial SE
    ``sqrt(p(1-p)/count)`` of ``count`` Bernoulli trials at the theory value.

    The floor matters when every species survives in every run and the
    empirical SE collapses to 0.
    """
    samples = np.asarray(samples, dtype=float)
    emp = samples.std(ddof=1) / np.sqrt(samples.size) if samples.size > 1 else 0.0
    return float(max(emp, np.sqrt(p_theory * (1.0 - p_theory) / count)))


def figure_prop(cfg):
    """Mean survival fraction against ``gamma(kappa)`` for each ``rho``."""
    seed = cfg.require_seed()
    rows = []
    for ri, rho in enumerate(cfg.rhos):
        kappas = _kappas(cfg, rho)
        base = derive_seed(seed, ri)
        jobs = [
            (derive_seed(base, rep), cfg.n, rho, cfg.growth, kappas, cfg.gate)
            for rep in range(cfg.replications)
        ]
        stats = np.stack(_map_ordered(_prop_replication, jobs, cfg.workers))
        for i, kappa in enumerate(kappas):
            gamma = _solve_quiet(kappa, rho, cfg.growth).gamma
            s = stats[:, i, 0]
            rows.append(
                {
                    "kappa": float(kappa),
                    "rho": rho,
                    "gamma_theory": gamma,
                    "gamma_mc_mean": float(s.mean()),
                    "gamma_mc_se": mc_standard_error(s, gamma, cfg.n * cfg.replications),
                    "gamma_mc_mean_eps": float(stats[:, i, 1].mean()),
                    "gate_pass_fraction": float(stats[:, i, 2].mean()),
                }
            )
    return {"prop": rows}


def _curve_grid(top):
    return np.linspace(0.0, top, CURVE_POINTS + 1)[1:]


def _pooled_equilibria(cfg, rho, kappa):
    seed = cfg.require_seed()
    r_fn = _CfgGrowth(cfg)
    jobs = [(derive_seed(seed, rep), cfg.n, rho, kappa, r_fn, cfg.gate) for rep in range(cfg.replications)]
    return np.stack(_map_ordered(_equilibrium_replication, jobs, cfg.workers))


def figure_dist(cfg):
    """Pooled positive abundances against ``f_surv`` at one ``(kappa, rho)``."""
    seed = cfg.require_seed()
    sol = solve_system(cfg.kappa, cfg.rho, cfg.growth)
    law = LimitLaw(sol, cfg.growth)
    X = _pooled_equilibria(cfg, cfg.rho, cfg.kappa)
    pos = X[X > 0]
    ref = f_surv_sample(law, cfg.limit_samples, seed)
    dens, edges = histogram(pos)
    ys = _curve_grid(max(edges[-1], np.quantile(ref, 0.9999)))
    surv = (X > 0).mean(axis=1)
    summary = [
        {
            "kappa": cfg.kappa,
            "rho": cfg.rho,
            "gamma_theory": sol.gamma,
            "gamma_mc_mean": float(surv.mean()),
            "gamma_mc_se": mc_standard_error(surv, sol.gamma, X.size),
            "positive_count": int(pos.size),
            "w2_f_surv": wasserstein2_1d(pos, ref),
        }
    ]
    return {
        "dist_hist": _hist_rows(dens, edges),
        "dist_curve": [{"y": float(y), "f_surv": float(f)} for y, f in zip(ys, f_surv_density(law, ys))],
        "dist_summary": summary,
    }


def _hist_rows(dens, edges, **extra):
    return [
        dict(extra, bin_left=float(lo), bin_right=float(hi), density=float(d))
        for lo, hi, d in zip(edges[:-1], edges[1:], dens)
    ]


def figure_truncdist(cfg):
    """``f_surv`` curves at ``kappa`` for every ``rho`` in ``cfg.rhos``."""
    laws = [LimitLaw(solve_system(cfg.kappa, rho, cfg.growth), cfg.growth) for rho in cfg.rhos]
    top = max(law.scale * (law.sigma * 5 + cfg.growth.r.max()) for law in laws)
    ys = _curve_grid(top)
    rows = []
    for rho, law in zip(cfg.rhos, laws):
        f = f_surv_density(law, ys)
        rows.extend({"rho": rho, "y": float(y), "f_surv": float(v)} for y, v in zip(ys, f))
    summary = [
        {"rho": rho, "delta": law.solution.delta, "sigma": law.sigma, "gamma": law.survival, "scale": law.scale}
        for rho, law in zip(cfg.rhos, laws)
    ]
    return {"truncdist": rows, "truncdist_summary": summary}


FIG2_FRACTIONS = (0.5, 0.3, 0.2)
FIG2_GROWTH = (1.0, 3.0, 6.0)


def figure_exchangeability(cfg):
    """Per-block abundance laws in the block model, with their mixture."""
    seed = cfg.require_seed()
    if cfg.partition() is None:
        cfg = dataclasses.replace(
            cfg,
            block_fractions=FIG2_FRACTIONS,
            block_growth=tuple(GrowthLaw.constant(v) for v in FIG2_GROWTH),
        )
    part = cfg.partition()
    glob = GrowthLaw.mixture(cfg.block_growth, part.proportions)
    sol = solve_system(cfg.kappa, cfg.rho, glob)
    law, blocks = block_laws(sol, part, cfg.block_growth)
    X = _pooled_equilibria(cfg, cfg.rho, cfg.kappa)
    per_rep = [block_statistics(x, part) for x in X]
    hist_rows, summary = [], []
    top = 0.0
    for j, (blaw, size) in enumerate(zip(blocks, part.sizes)):
        surv = np.array([s[j][0] for s in per_rep])
        pos = np.concatenate([s[j][1].values for s in per_rep])
        ref = f_surv_sample(blaw, cfg.limit_samples, derive_seed(seed, 1000 + j))
        dens, edges = histogram(pos)
        top = max(top, edges[-1], np.quantile(ref, 0.9999))
        hist_rows.extend(_hist_rows(dens, edges, block=j + 1))
        summary.append(
            {
                "block": j + 1,
                "size": size,
                "r_mean": cfg.block_growth[j].mean(),
                "gamma_theory": blaw.survival,
                "gamma_mc_mean": float(surv.mean()),
                "gamma_mc_se": mc_standard_error(surv, blaw.survival, size * cfg.replications),
                "w2_f_surv": wasserstein2_1d(pos, ref) if pos.size else float("nan"),
            }
        )
    ys = _curve_grid(top)
    curve_rows = []
    for j, blaw in enumerate(blocks):
        curve_rows.extend({"block": j + 1, "y": float(y), "f_surv": float(v)} for y, v in zip(ys, f_surv_density(blaw, ys)))
    curve_rows.extend({"block": 0, "y": float(y), "f_surv": float(v)} for y, v in zip(ys, f_surv_density(law, ys)))
    ident = mixture_identity(part, law, blocks)
    for row in summary:
        row["mixture_identity"] = ident
    return {
        "exchangeability_hist": hist_rows,
        "exchangeability_curve": curve_rows,
        "exchangeability_summary": summary,
    }


_FIGURES = {
    "prop": figure_prop,
    "dist": figure_dist,
    "truncdist": figure_truncdist,
    "exchangeability": figure_exchangeability,
}


def metadata(cfg, **extra):
    meta = {
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "versions": f"ellipticamp-{__version__},numpy-{np.__version__},scipy-{scipy.__version__}",
        "binning": "freedman-diaconis",
        "gate": cfg.gate,
    }
    meta.update(extra)
    return meta


def write_csv(path, rows, meta):
    """CSV with one ``#`` metadata row, then a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        fh.write("# " + "; ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path


def read_csv(path):
    """Rows of a CSV written by :func:`write_csv` (values as floats where possible)."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        conv = {}
        for k, v in row.items():
            try:
                conv[k] = float(v)
            except ValueError:
                conv[k] = v
        out.append(conv)
    return out


def run_figure(name, cfg, output_dir=None):
    """Compute figure ``name`` and write its CSV tables; returns the paths."""
    if name not in _FIGURES:
        raise InvalidParameterError(f"unknown figure {name!r}; choose from {FIGURES}")
    tables = _FIGURES[name](cfg)
    out = Path(output_dir) if output_dir is not None else cfg.resolved_output_dir()
    extra = {}
    if name == "prop":
        extra["kappa_grid"] = "default" if cfg.kappa_grid is None else "config"
    meta = metadata(cfg, figure=name, **extra)
    return [write_csv(out / f"{table}.csv", rows, meta) for table, rows in tables.items()]
