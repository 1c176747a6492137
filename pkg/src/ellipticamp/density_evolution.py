"""Density evolution: the covariances ``R^k`` that describe AMP iterates.

``R^1 = E h_0(u, b)^2`` and, with ``Z_0 = u`` and
``(Z_1, ..., Z_{k-1}) ~ N(0, R^{k-1})`` independent of ``(u, b)``,

    R^k_{ij} = E[h_{i-1}(Z_{i-1}, b) h_{j-1}(Z_{j-1}, b)].

``R^{k-1}`` is the upper-left block of ``R^k``; extending by one order
only fills in the new last row and column.  The law of ``(u, b)`` is a
finite mixture of point masses; Gaussian expectations are evaluated by
quadrature (see :mod:`ellipticamp.quadrature`).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .fixed_point import GrowthLaw, f_aux
from .quadrature import gauss_expect, gauss_expect_pair


@dataclass(frozen=True)
class AtomicLaw:
    """Joint atomic law of the initial value ``u`` and parameters ``b``."""

    u: np.ndarray
    B: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.u, dtype=float))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        w = np.atleast_1d(np.asarray(self.w, dtype=float))
        if not (u.shape[0] == B.shape[0] == w.shape[0]):
            raise InvalidParameterError("atom arrays have mismatched lengths")
        if np.any(w <= 0) or abs(w.sum() - 1) > 1e-12:
            raise InvalidParameterError("atom weights must be positive and sum to 1")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "w", w)

    @classmethod
    def lv(cls, growth, scale, u0=1.0):
        """Law of ``(u0, scale * r)`` for the Lotka-Volterra AMP."""
        r = growth.r
        return cls(np.full(r.shape, float(u0)), (scale * r)[:, None], growth.w)

    def __iter__(self):
        return iter(zip(self.u, self.B, self.w))


@dataclass(frozen=True)
class DECovariance:
    R: np.ndarray
    provenance: str = ""

    @property
    def k(self):
        return self.R.shape[0]

    def block(self, j):
        """``R^j`` as the upper-left ``j x j`` block."""
        return DECovariance(self.R[:j, :j].copy(), self.provenance)

    def sigma2(self, j):
        """``R_{j,j}`` (1-based)."""
        return float(self.R[j - 1, j - 1])

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.R)[0])

    def is_positive_definite(self, tol=1e-10):
        return self.min_eigenvalue() > tol

    def alpha_bar(self, j):
        """``(R^j)^{-1} R^{j+1}_{[j], j+1}``; needs ``j < k``."""
        return np.linalg.solve(self.R[:j, :j], self.R[:j, j])

    def schur_sigma2(self, j):
        """Schur complement of ``R^{j-1}`` in ``R^j`` (1-based ``j >= 2``)."""
        c = self.R[: j - 1, j - 1]
        return float(self.R[j - 1, j - 1] - c @ np.linalg.solve(self.R[: j - 1, : j - 1], c))


def _vectorised(fam, k, b):
    """``u -> h_k(u, b)`` for fixed parameters ``b``, any input shape."""
    b = np.asarray(b, dtype=float)

    def fn(u):
        u = np.asarray(u, dtype=float)
        flat = u.reshape(-1)
        out = fam.h(k, flat, np.broadcast_to(b, (flat.size, b.size)))
        return np.asarray(out).reshape(u.shape)

    return fn


def de_init(fam, law, provenance=""):
    """``R^1 = E h_0(u, b)^2``."""
    val = sum(w * _vectorised(fam, 0, b)(np.array([u]))[0] ** 2 for u, b, w in law)
    return DECovariance(np.array([[float(val)]]), provenance or fam.name)


def de_extend(Rk, fam, law, order=64, check=True):
    """Return ``R^{k+1}`` from ``R^k`` (which is copied in unchanged)."""
    R = np.asarray(Rk.R, dtype=float)
    k = R.shape[0]
    if not np.allclose(R, R.T, rtol=0, atol=1e-12):
        raise InvalidInputError("R^k is not symmetric")
    if np.linalg.eigvalsh(R)[0] < -1e-10:
        raise InvalidInputError("R^k is not positive semidefinite")
    out = np.zeros((k + 1, k + 1))
    out[:k, :k] = R
    var_k = R[k - 1, k - 1]
    sd_k = np.sqrt(max(var_k, 0.0))
    row = np.zeros(k + 1)
    for u, b, w in law:
        hk = _vectorised(fam, k, b)
        kinks_k = fam.kink_points(k, b)
        # j = 1: Z_0 is the atom value itself
        h0 = _vectorised(fam, 0, b)(np.array([u]))[0]
        row[0] += w * h0 * gauss_expect(hk, sd_k, kinks=kinks_k, order=order, check=check)
        for j in range(2, k + 1):
            cov = np.array([[R[j - 2, j - 2], R[j - 2, k - 1]], [R[k - 1, j - 2], var_k]])
            row[j - 1] += w * gauss_expect_pair(
                _vectorised(fam, j - 1, b),
                hk,
                cov,
                fam.kink_points(j - 1, b),
                kinks_k,
                order=order,
                check=check,
            )
        row[k] += w * gauss_expect(lambda z: hk(z) ** 2, sd_k, kinks=kinks_k, order=order, check=check)
    out[k, :] = row
    out[:, k] = row
    return DECovariance(out, Rk.provenance)


def de_run(fam, law, K, order=64, check=True, provenance=""):
    """``R^K`` built by repeated extension from ``R^1``."""
    if int(K) != K or K < 1:
        raise InvalidParameterError(f"K must be a positive integer, got {K!r}")
    R = de_init(fam, law, provenance)
    for _ in range(int(K) - 1):
        R = de_extend(R, fam, law, order=order, check=check)
    return R


@dataclass(frozen=True)
class ScalarDE:
    delta: float
    a_law: GrowthLaw
    theta: np.ndarray

    @property
    def theta2(self):
        return self.theta**2


def de_scalar_lv(delta, a_law, K):
    """Variances of the Lotka-Volterra AMP iterates.

    ``theta_1^2 = E(1 + a)_+^2 / delta^2`` and
    ``theta_{k+1}^2 = E(theta_k Z + a)_+^2 / delta^2``, the Gaussian
    expectation being ``theta^2 f(-a/theta)`` in closed form.
    """
    delta = float(delta)
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    if int(K) != K or K < 1:
        raise InvalidParameterError(f"K must be a positive integer, got {K!r}")
    a, w = a_law.r, a_law.w
    theta2 = np.empty(int(K))
    theta2[0] = float(w @ np.maximum(1.0 + a, 0.0) ** 2) / delta**2
    for k in range(1, int(K)):
        t = np.sqrt(theta2[k - 1])
        theta2[k] = float(w @ (theta2[k - 1] * f_aux(-a / t))) / delta**2
    return ScalarDE(delta, a_law, np.sqrt(theta2))


def sigma_sequence(theta, delta, kappa):
    """``sigma_k = (delta / kappa) theta_k``."""
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be positive, got {kappa}")
    return (float(delta) / float(kappa)) * np.asarray(theta, dtype=float)
