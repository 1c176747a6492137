import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipticamp.amp import constant_activation, identity_activation, lv_activation
from ellipticamp.density_evolution import (
    AtomicLaw,
    DECovariance,
    de_extend,
    de_init,
    de_run,
    de_scalar_lv,
    sigma_sequence,
)
from ellipticamp.errors import InvalidInputError, InvalidParameterError
from ellipticamp.fixed_point import GrowthLaw, f_aux, solve_system


def test_constant_h0():
    law = AtomicLaw([1.0, -2.0], [[0.0], [1.0]], [0.5, 0.5])
    assert de_init(constant_activation(1.7), law).R[0, 0] == pytest.approx(1.7**2)


def test_identity_variance_propagates():
    law = AtomicLaw([1.0, -1.0], [[0.0], [0.0]], [0.5, 0.5])
    R = de_run(identity_activation(), law, 4).R
    assert np.allclose(np.diag(R), 1.0, atol=1e-12)


def test_lv_diagonal_matches_scalar():
    sol = solve_system(2.0, 0.4, GrowthLaw.constant(1.0))
    a_law = GrowthLaw.constant(sol.scale)
    R = de_run(lv_activation(sol.delta), AtomicLaw.lv(sol.law, sol.scale), 6)
    theta = de_scalar_lv(sol.delta, a_law, 6).theta
    assert np.max(np.abs(np.diag(R.R) - theta**2)) <= 1e-8
    assert R.is_positive_definite()


def test_quadrature_order_convergence():
    fam = lv_activation(1.5)
    law = AtomicLaw.lv(GrowthLaw([0.5, 2.0], [0.4, 0.6]), 1.2)
    lo = de_run(fam, law, 5, order=64).R
    hi = de_run(fam, law, 5, order=128).R
    assert np.max(np.abs(lo - hi)) <= 1e-8


def test_rejects_bad_input():
    fam = identity_activation()
    law = AtomicLaw([1.0], [[0.0]], [1.0])
    with pytest.raises(InvalidInputError):
        de_extend(DECovariance(np.array([[1.0, 2.0], [0.0, 1.0]])), fam, law)
    with pytest.raises(InvalidInputError):
        de_extend(DECovariance(np.array([[1.0, 2.0], [2.0, 1.0]])), fam, law)


def test_scalar_recursion():
    a_law = GrowthLaw.constant(1.0)
    s = de_scalar_lv(2.0, a_law, 30)
    assert s.theta2[0] == pytest.approx(4.0 / 4.0)
    sol = solve_system(2.0, 0.0, a_law)
    assert abs(sigma_sequence(s.theta, 2.0, 2.0)[-1] - sol.sigma) <= 1e-6
    # large theta: the ratio tends to f(0)/delta^2
    big = de_scalar_lv(0.9, GrowthLaw.constant(1e-9), 3).theta2
    assert big[2] / big[1] == pytest.approx(f_aux(0.0) / 0.81, rel=1e-6)
    with pytest.raises(InvalidParameterError):
        de_scalar_lv(0.0, a_law, 3)


def test_sigma_sequence():
    assert np.allclose(sigma_sequence([1.0, 2.0], 2.0, 4.0), [0.5, 1.0])
    assert np.array_equal(sigma_sequence([0.3, 0.7], 1.5, 1.5), [0.3, 0.7])


def test_sigma_sequence_converges_monotonically():
    sol = solve_system(2.0, 0.4, GrowthLaw.constant(1.0))
    theta = de_scalar_lv(sol.delta, sol.law.scaled(sol.scale), 50).theta
    sig = sigma_sequence(theta, sol.delta, sol.kappa)
    assert np.all(np.diff(sig) <= 0)
    assert abs(sig[-1] - sol.sigma) <= 1e-10


def test_schur_accessors():
    R = de_run(lv_activation(1.2), AtomicLaw.lv(GrowthLaw.constant(1.0), 1.0), 4)
    s = R.schur_sigma2(3)
    assert 0 < s <= R.sigma2(3)
    alpha = R.alpha_bar(2)
    assert np.allclose(R.R[:2, :2] @ alpha, R.R[:2, 2])


@settings(max_examples=15, deadline=None)
@given(
    delta=st.floats(0.8, 3.0),
    values=st.lists(st.floats(0.05, 4.0), min_size=1, max_size=3),
    u0=st.floats(-1.0, 2.0),
)
def test_nesting_and_psd(delta, values, u0):
    law = GrowthLaw(values)
    at = AtomicLaw(np.full(len(values), u0), law.r[:, None], law.w)
    fam = lv_activation(delta)
    R3 = de_run(fam, at, 3)
    R4 = de_extend(R3, fam, at)
    assert np.array_equal(R4.R[:3, :3], R3.R)
    assert np.array_equal(R4.R, R4.R.T)
    assert R4.min_eigenvalue() >= -1e-10
