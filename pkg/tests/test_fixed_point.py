import math
import warnings

import numpy as np
import pytest

from ellipticamp.errors import InvalidParameterError, OutOfDomainError
from ellipticamp.fixed_point import (
    GrowthLaw,
    f_aux,
    f_aux_prime,
    gamma_derivative,
    gamma_of,
    h_of_delta,
    kappa_threshold,
    q_tail,
    solve_sigma,
    solve_system,
    x_derivative,
    x_of,
)
from ellipticamp.rng import stream

from oracles import picard_sigma, picard_system

ONE = GrowthLaw.constant(1.0)


def test_growth_law_validation():
    with pytest.raises(InvalidParameterError):
        GrowthLaw([0.0])
    with pytest.raises(InvalidParameterError):
        GrowthLaw([1.0, -1.0], [0.5, 0.5])
    with pytest.raises(InvalidParameterError):
        GrowthLaw([1.0, 2.0], [0.5, 0.6])
    law = GrowthLaw([1.0, 3.0], [0.25, 0.75])
    assert GrowthLaw.from_dict(law.to_dict()) == law
    assert law.mean() == pytest.approx(2.5)


def test_q_tail():
    assert q_tail(0.0) == 0.5
    assert q_tail(10.0) < 1e-22
    for x in (0.3, 1.7, -2.5):
        assert q_tail(x) + q_tail(-x) == pytest.approx(1.0, abs=1e-15)


def test_f_aux():
    assert f_aux(0.0) == 0.5
    h = 1e-5
    for x in (-2.0, -0.5, 1.0):
        fd = (f_aux(x + h) - f_aux(x - h)) / (2 * h)
        assert abs(fd - f_aux_prime(x)) <= 1e-6
    assert abs(f_aux(-8.0) - 65.0) <= 1e-6


def test_solve_sigma_against_picard_oracle():
    s = solve_sigma(2.0, ONE)
    assert abs(s - picard_sigma(2.0, [1.0], [1.0])) <= 1e-8


def test_sigma_blows_up_near_threshold():
    vals = [solve_sigma(d, ONE) for d in (0.71, 0.708, 0.7072)]
    assert vals[0] < vals[1] < vals[2]
    with pytest.raises(OutOfDomainError):
        solve_sigma(0.5, ONE)


def test_gamma_basic():
    g = gamma_of(2.0, GrowthLaw.constant(3.0))
    assert 0.5 < g < 1.0
    for d in (0.8, 1.0, 2.0, 5.0):
        assert gamma_of(d, ONE) < d * d


def test_gamma_two_atoms_monte_carlo():
    law = GrowthLaw([1.0, 3.0], [0.5, 0.5])
    sigma = solve_sigma(2.0, law)
    g = gamma_of(2.0, law)
    assert g == pytest.approx(0.5 * q_tail(-1 / sigma) + 0.5 * q_tail(-3 / sigma), abs=1e-15)
    rng = stream(17, "probe")
    m = 10_000_000
    hits = 0
    for _ in range(10):
        r = np.where(rng.uniform(size=m // 10) < 0.5, 1.0, 3.0)
        hits += np.count_nonzero(sigma * rng.standard_normal(m // 10) + r > 0)
    p = hits / m
    assert abs(p - g) <= 3 * math.sqrt(g * (1 - g) / m)


def test_solve_system_rho_zero():
    for law in (ONE, GrowthLaw([0.5, 2.0], [0.3, 0.7])):
        sol = solve_system(2.0, 0.0, law)
        assert abs(sol.delta - 2.0) <= 1e-10


def test_solve_system_against_oracle():
    sol = solve_system(2.0, 0.4, ONE)
    d, s, g = picard_system(2.0, 0.4, [1.0], [1.0])
    assert abs(sol.delta - d) <= 1e-6 and abs(sol.sigma - s) <= 1e-6 and abs(sol.gamma - g) <= 1e-6
    assert max(sol.residuals) <= 1e-8
    assert abs(1 + 0.4 * sol.gamma / sol.delta**2 - sol.scale) <= 1e-10


def test_solve_system_domain():
    with pytest.raises(OutOfDomainError):
        solve_system(kappa_threshold(0.3), 0.3, ONE)
    with pytest.raises(OutOfDomainError):
        solve_system(0.1, 0.9, ONE)
    with pytest.warns(RuntimeWarning):
        solve_system(1.3, 0.0, ONE)


def test_derivatives():
    h = 1e-5
    for d in (0.8, 1.5, 2.0, 3.0):
        fd = (x_of(d + h, ONE) - x_of(d - h, ONE)) / (2 * h)
        assert abs(fd / x_derivative(d, ONE) - 1) <= 1e-5
        assert x_derivative(d, ONE) < 0
        assert gamma_derivative(d, ONE) < d


@pytest.mark.parametrize("rho", [-1.0, -0.7, 0.0, 0.4, 1.0])
def test_h_and_sigma_monotone(rho):
    grid = np.linspace(1 / math.sqrt(2), 6.0, 101)[1:]
    h = np.array([h_of_delta(d, rho, ONE) for d in grid])
    s = np.array([solve_sigma(d, ONE) for d in grid])
    assert np.all(np.diff(h) > 0)
    assert np.all(np.diff(s) < 0)


def test_residuals_on_grid():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for rho in (-1.0, -0.7, 0.0, 0.4, 1.0):
            for kappa in (1.5, 2.0, 3.0, 5.0):
                sol = solve_system(kappa, rho, GrowthLaw([1.0, 3.0, 6.0], [0.5, 0.3, 0.2]))
                assert max(sol.residuals) <= 1e-8
                assert abs(1 + rho * sol.gamma / sol.delta**2 - kappa / sol.delta) <= 1e-10
