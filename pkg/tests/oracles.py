"""Independent reference computations used by the tests.

Nothing here calls into the closed-form helpers of the package: Gaussian
integrals go through adaptive quadrature and fixed points through damped
Picard iteration.
"""

import math

import numpy as np
from scipy.integrate import quad


def phi(z):
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def pos_second_moment(sigma, r):
    """E[(sigma Z + r)_+^2] by adaptive quadrature."""
    lo = -r / sigma
    val, _ = quad(lambda z: (sigma * z + r) ** 2 * phi(z), lo, np.inf, epsabs=1e-14, epsrel=1e-13)
    return val


def pos_prob(sigma, r):
    val, _ = quad(phi, -r / sigma, np.inf, epsabs=1e-15, epsrel=1e-13)
    return val


def picard_system(kappa, rho, values, weights, damping=0.5, tol=1e-13, max_iter=20_000):
    """(delta, sigma, gamma) by damped Picard on (delta, sigma).

    delta is the larger root of delta^2 - kappa delta + rho gamma = 0.
    """
    values = np.atleast_1d(values)
    weights = np.atleast_1d(weights)
    sigma, delta = 1.0, kappa
    for _ in range(max_iter):
        gamma = sum(w * pos_prob(sigma, r) for r, w in zip(values, weights))
        delta_new = 0.5 * (kappa + math.sqrt(kappa * kappa - 4.0 * rho * gamma))
        m2 = sum(w * pos_second_moment(sigma, r) for r, w in zip(values, weights))
        sigma_new = math.sqrt(m2) / delta_new
        step = max(abs(sigma_new - sigma), abs(delta_new - delta))
        sigma = (1 - damping) * sigma + damping * sigma_new
        delta = (1 - damping) * delta + damping * delta_new
        if step < tol:
            break
    gamma = sum(w * pos_prob(sigma, r) for r, w in zip(values, weights))
    return delta, sigma, gamma


def picard_sigma(delta, values, weights, damping=0.5, tol=1e-13, max_iter=20_000):
    """sigma <- sqrt(E(sigma Z + r)_+^2) / delta, damped."""
    sigma = 1.0
    for _ in range(max_iter):
        m2 = sum(w * pos_second_moment(sigma, r) for r, w in zip(values, weights))
        new = math.sqrt(m2) / delta
        if abs(new - sigma) < tol:
            return new
        sigma = (1 - damping) * sigma + damping * new
    return sigma


def goe_amp_reference(A, B, u0, h, dh, K):
    """Symmetric AMP with the plain Onsager term, written from scratch."""
    n = A.shape[0]
    us = []
    q_prev = np.zeros(n)
    u = np.asarray(u0, dtype=float)
    for k in range(K):
        q = h(k, u, B)
        b = float(np.mean(dh(k, u, B))) if k > 0 else 0.0
        u_next = A @ q - b * q_prev
        us.append(u_next)
        q_prev = q
        u = u_next
    return np.array(us)


def brute_force_w2(a, b):
    """W2 between equal-size empirical measures by trying every pairing."""
    from itertools import permutations

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    best = min(np.mean((a - b[list(p)]) ** 2) for p in permutations(range(b.size)))
    return math.sqrt(best)
