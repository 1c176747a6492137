"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured
numbers, then asserts.  Seeds are fixed up front.
"""

import math
import time
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from ellipticamp.amp import ActivationFamily, amp_run, lv_activation
from ellipticamp.density_evolution import AtomicLaw, de_extend, de_run, de_scalar_lv, sigma_sequence
from ellipticamp.experiments import ExperimentConfig, figure_dist, figure_exchangeability, figure_prop, run_amp_lv
from ellipticamp.fixed_point import (
    GrowthLaw,
    gamma_derivative,
    gamma_of,
    h_of_delta,
    solve_system,
    x_derivative,
    x_of,
)
from ellipticamp.lcp import LCPInstance, contraction_solve, equilibrium, lemke
from ellipticamp.lv_stats import LimitLaw, f_surv_density, wasserstein2_1d
from ellipticamp.rand_matrix import EllipticEnsemble, sample_normalized_elliptic, spectral_norm
from ellipticamp.rng import derive_seed

from oracles import goe_amp_reference, picard_system

SEED = 20240601
ONE = GrowthLaw.constant(1.0)
RHOS = (-0.7, 0.0, 0.4)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")

    return emit


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_01_ensemble_moments(report):
    with Timer() as t:
        worst_var = worst_corr = 0.0
        for i, rho in enumerate(RHOS):
            M = EllipticEnsemble(2, rho, seed=derive_seed(SEED, i)).sample_batch(100_000)
            worst_var = max(worst_var, abs(M[:, 0, 0].var() - (1 + rho)))
            worst_corr = max(worst_corr, abs(np.corrcoef(M[:, 0, 1], M[:, 1, 0])[0, 1] - rho))
    ok = worst_var <= 0.05 and worst_corr <= 0.02 and t.elapsed < 10
    report(1, ok, f"max|var-(1+rho)|={worst_var:.4f}, max|corr-rho|={worst_corr:.4f}, {t.elapsed:.1f}s")
    assert ok


def test_02_spectral_norm(report):
    with Timer() as t:
        worst = 0.0
        norms = {}
        for i, rho in enumerate(RHOS):
            target = math.sqrt(2 * (1 + rho))
            vals = [spectral_norm(sample_normalized_elliptic(2000, rho, derive_seed(SEED + i, s))) for s in range(10)]
            norms[rho] = (np.mean(vals), target)
            worst = max(worst, max(abs(v - target) / target for v in vals))
    ok = worst <= 0.05 and t.elapsed < 60
    detail = ", ".join(f"rho={r}: mean ||A||={m:.4f} vs {tg:.4f}" for r, (m, tg) in norms.items())
    report(2, ok, f"max rel dev {worst:.3f}; {detail}; {t.elapsed:.1f}s")
    assert ok


def test_03_solver_exactness(report):
    with Timer() as t, warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        dev = max(abs(solve_system(k, 0.0, ONE).delta - k) for k in (1.5, 2.0, 3.0))
        law = GrowthLaw([1.0, 3.0], [0.5, 0.5])
        res = 0.0
        for rho in (-1.0, -0.7, 0.0, 0.4, 1.0):
            for kappa in (1.5, 2.0, 3.0, 5.0):
                for g in (ONE, law):
                    res = max(res, max(solve_system(kappa, rho, g).residuals))
        oracle = 0.0
        for kappa, rho in ((2.0, 0.4), (1.5, -0.7), (3.0, 1.0)):
            s = solve_system(kappa, rho, ONE)
            d, sg, gm = picard_system(kappa, rho, [1.0], [1.0])
            oracle = max(oracle, abs(s.delta - d), abs(s.sigma - sg), abs(s.gamma - gm))
    ok = dev <= 1e-10 and res <= 1e-8 and oracle <= 1e-6 and t.elapsed < 5
    report(3, ok, f"|delta-kappa|={dev:.1e}, residuals<={res:.1e}, oracle gap {oracle:.1e}, {t.elapsed:.1f}s")
    assert ok


def test_04_derivatives(report):
    with Timer() as t:
        h = 1e-5
        worst = 0.0
        for d in (0.8, 1.5, 3.0):
            fx = (x_of(d + h, ONE) - x_of(d - h, ONE)) / (2 * h)
            fg = (gamma_of(d + h, ONE) - gamma_of(d - h, ONE)) / (2 * h)
            worst = max(worst, abs(fx / x_derivative(d, ONE) - 1), abs(fg / gamma_derivative(d, ONE) - 1))
        grid = np.linspace(1 / math.sqrt(2), 6.0, 101)[1:]
        ineq = all(gamma_derivative(d, ONE) < d and gamma_of(d, ONE) < d * d for d in grid)
        mono = all(
            np.all(np.diff([h_of_delta(d, rho, ONE) for d in grid]) > 0) for rho in (-1.0, -0.7, 0.0, 0.4, 1.0)
        )
    ok = worst <= 1e-5 and ineq and mono and t.elapsed < 5
    report(4, ok, f"max rel FD gap {worst:.1e}, inequalities {ineq}, h monotone {mono}, {t.elapsed:.1f}s")
    assert ok


def test_05_lcp_cross_solver(report):
    with Timer() as t:
        gap = kkt = 0.0
        count = 0
        for i, rho in enumerate(RHOS):
            got, s = 0, 0
            while got < 50:
                A = sample_normalized_elliptic(100, rho, derive_seed(SEED + 10 + i, s))
                s += 1
                norm = spectral_norm(A)
                if not norm / 2.0 < 1:
                    continue
                Sigma, r = A / 2.0, np.ones(100)
                inst = LCPInstance.lotka_volterra(Sigma, r)
                x_c = np.maximum(contraction_solve(Sigma, r, norm=norm / 2.0), 0)
                x_l = lemke(inst)
                gap = max(gap, np.max(np.abs(x_c - x_l)))
                kkt = max(kkt, *inst.residuals(x_c), *inst.residuals(x_l))
                got += 1
            count += got
    ok = gap <= 1e-8 and kkt <= 1e-8 and t.elapsed < 60
    report(5, ok, f"{count} gated instances, max solver gap {gap:.1e}, max KKT {kkt:.1e}, {t.elapsed:.1f}s")
    assert ok


def test_06_fig1a(report):
    cfg = ExperimentConfig(scenario="fig1a", n=200, replications=100, seed=SEED, rhos=RHOS)
    with Timer() as t:
        rows = figure_prop(cfg)["prop"]
    z = np.array([abs(r["gamma_mc_mean"] - r["gamma_theory"]) / r["gamma_mc_se"] for r in rows])
    ok = np.all(z <= 3) and t.elapsed < 300
    report(6, ok, f"{len(rows)} grid points, max |mean-gamma|/SE = {z.max():.2f}, {t.elapsed:.1f}s")
    assert ok


def test_07_fig1b(report):
    cfg = ExperimentConfig(scenario="fig1b", n=200, rho=0.4, kappa=2.0, replications=500, seed=SEED)
    with Timer() as t:
        (row,) = figure_dist(cfg)["dist_summary"]
    ok = row["w2_f_surv"] <= 0.05 and t.elapsed < 300
    report(7, ok, f"W2(pooled positives, f_surv) = {row['w2_f_surv']:.4f} over {row['positive_count']} values, {t.elapsed:.1f}s")
    assert ok


def test_08_fig2(report):
    cfg = ExperimentConfig(scenario="fig2", n=500, rho=0.0, kappa=2.0, replications=100, seed=SEED)
    with Timer() as t:
        rows = figure_exchangeability(cfg)["exchangeability_summary"]
    z = [abs(r["gamma_mc_mean"] - r["gamma_theory"]) / r["gamma_mc_se"] for r in rows]
    w2 = [r["w2_f_surv"] for r in rows]
    ident = abs(rows[0]["mixture_identity"] - 1)
    ok = max(z) <= 3 and max(w2) <= 0.08 and ident <= 1e-10 and t.elapsed < 300
    report(
        8,
        ok,
        f"block z-scores {np.round(z, 2).tolist()}, W2 {np.round(w2, 4).tolist()}, "
        f"|sum c_j gamma_j/gamma - 1| = {ident:.1e}, {t.elapsed:.1f}s",
    )
    assert ok


def test_09_amp_vs_de(report):
    with Timer() as t:
        worst = 0.0
        for i, rho in enumerate((0.0, 0.4)):
            cfg = ExperimentConfig(n=4000, kappa=2.0, rho=rho, K=5, seed=derive_seed(SEED, 40 + i), limit_samples=10_000)
            worst = max(worst, max(r["rel_err"] for r in run_amp_lv(cfg)))
        sol = solve_system(2.0, 0.4, ONE)
        theta = de_scalar_lv(sol.delta, ONE.scaled(sol.scale), 50).theta
        conv = abs(sigma_sequence(theta, sol.delta, 2.0)[-1] - sol.sigma)
    ok = worst <= 0.05 and conv <= 1e-4 and t.elapsed < 120
    report(9, ok, f"max |var(u^k)-theta_k^2|/theta_k^2 = {worst:.4f}, |sigma_50-sigma| = {conv:.1e}, {t.elapsed:.1f}s")
    assert ok


def test_10_goe_reduction(report):
    n, K = 100, 4
    A = sample_normalized_elliptic(n, 1.0, SEED)
    B = np.linspace(-1, 1, n)[:, None]
    fam = ActivationFamily(
        lambda k, u, B: np.tanh(u + (k + 1) * B[:, 0]),
        lambda k, u, B: 1 - np.tanh(u + (k + 1) * B[:, 0]) ** 2,
    )
    u0 = np.cos(np.arange(n))
    gap = np.max(np.abs(amp_run(A, B, u0, fam, 1.0, K).u - goe_amp_reference(A, B, u0, fam.h, fam.dh, K)))
    ok = gap <= 1e-12
    report(10, ok, f"max gap to symmetric reference {gap:.1e}")
    assert ok


def test_11_property_suites(report):
    rng = np.random.default_rng(SEED)
    # density evolution nesting and PSD
    nest_ok = True
    for _ in range(5):
        law = GrowthLaw(rng.uniform(0.1, 3, size=2))
        at = AtomicLaw.lv(law, rng.uniform(1, 1.5))
        fam = lv_activation(rng.uniform(0.8, 2.5))
        R = de_run(fam, at, 3)
        R4 = de_extend(R, fam, at)
        nest_ok &= np.array_equal(R4.R[:3, :3], R.R) and R4.min_eigenvalue() >= -1e-10
    # W2 metric axioms
    w2_ok = True
    for _ in range(200):
        m = rng.integers(1, 40)
        a, b, c = rng.normal(size=m), rng.normal(size=m) * 2, rng.exponential(size=m)
        w2_ok &= wasserstein2_1d(a, a) == 0 and wasserstein2_1d(a, b) == wasserstein2_1d(b, a)
        w2_ok &= wasserstein2_1d(a, c) <= wasserstein2_1d(a, b) + wasserstein2_1d(b, c) + 1e-12
    # permutation equivariance of the equilibrium
    perm_gap = 0.0
    for s in range(5):
        A = sample_normalized_elliptic(60, RHOS[s % 3], derive_seed(SEED, 100 + s))
        r = rng.uniform(0, 2, 60)
        P = rng.permutation(60)
        x = equilibrium(A, 2.5, r, gate="symmetric").x_star
        y = equilibrium(A[np.ix_(P, P)], 2.5, r[P], gate="symmetric").x_star
        perm_gap = max(perm_gap, np.max(np.abs(y - x[P])))
    # f_surv normalisation
    norm_gap = 0.0
    for rho in RHOS:
        law = LimitLaw(solve_system(2.0, rho, ONE), ONE)
        val, _ = quad(lambda y: f_surv_density(law, y), 0, 20 * law.sigma * law.scale, limit=200, epsabs=1e-12)
        norm_gap = max(norm_gap, abs(val - 1))
    ok = nest_ok and w2_ok and perm_gap <= 1e-8 and norm_gap <= 1e-6
    report(
        11,
        ok,
        f"DE nesting/PSD {nest_ok}, W2 axioms {w2_ok}, permutation gap {perm_gap:.1e}, "
        f"f_surv normalisation gap {norm_gap:.1e}",
    )
    assert ok
