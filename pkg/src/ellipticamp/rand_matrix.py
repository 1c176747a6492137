"""Seeded Gaussian ensembles (GOE, antisymmetric GOE, elliptic) and norms.

An elliptic matrix with parameter ``rho`` is assembled from two
independent GOE-type matrices,

    M = sqrt((1 + rho)/2) G + sqrt((1 - rho)/2) G~,

with ``G = (X + X^T)/sqrt(2)`` and ``G~ = (Y - Y^T)/sqrt(2)``.  ``X`` and
``Y`` come from separate keyed streams, so ``rho = 1`` reproduces
``sample_goe`` bit for bit and ``rho = -1`` gives an exactly
antisymmetric matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    InvalidDimensionError,
    InvalidInputError,
    InvalidParameterError,
)
from .rng import stream

_SQRT2 = np.sqrt(2.0)


def _check_n(n):
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def _check_rho(rho):
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise InvalidParameterError(f"rho must lie in [-1, 1], got {rho}")
    return rho


def _raw_gaussian(seed, role, n, count):
    shape = (n, n) if count is None else (count, n, n)
    return stream(seed, role).standard_normal(shape)


def _goe_from(X):
    return (X + np.swapaxes(X, -1, -2)) / _SQRT2


def _antisym_from(Y):
    return (Y - np.swapaxes(Y, -1, -2)) / _SQRT2


def sample_goe(n, seed):
    """GOE matrix ``(X + X^T)/sqrt(2)``: off-diagonal variance 1, diagonal 2."""
    n = _check_n(n)
    return _goe_from(_raw_gaussian(seed, "goe", n, None))


def sample_antisymmetric_goe(n, seed):
    """Antisymmetric GOE matrix ``(Y - Y^T)/sqrt(2)`` (zero diagonal)."""
    n = _check_n(n)
    return _antisym_from(_raw_gaussian(seed, "antisym", n, None))


def _combine(G, Gt, rho):
    return np.sqrt((1.0 + rho) / 2.0) * G + np.sqrt((1.0 - rho) / 2.0) * Gt


def sample_elliptic(n, rho, seed):
    """Draw ``M ~ Elliptic(n, rho)``.

    Diagonal entries are N(0, 1 + rho); each pair ``(M_ij, M_ji)`` is a
    standard bivariate normal with correlation ``rho``.
    """
    n = _check_n(n)
    rho = _check_rho(rho)
    return _combine(sample_goe(n, seed), sample_antisymmetric_goe(n, seed), rho)


def sample_normalized_elliptic(n, rho, seed):
    """``A = M / sqrt(n)`` with ``M = sample_elliptic(n, rho, seed)``."""
    n = _check_n(n)
    return sample_elliptic(n, rho, seed) / np.sqrt(n)


@dataclass(frozen=True)
class EllipticEnsemble:
    """Parameters of a seeded elliptic ensemble.

    ``sample_batch(count)[0]`` equals ``sample()``: replication ``r`` of a
    batch reads the entries that follow replication ``r - 1`` in the same
    keyed streams.
    """

    n: int
    rho: float
    seed: int = 0

    def __post_init__(self):
        _check_n(self.n)
        _check_rho(self.rho)

    def sample(self):
        return sample_elliptic(self.n, self.rho, self.seed)

    def sample_normalized(self):
        return sample_normalized_elliptic(self.n, self.rho, self.seed)

    def sample_batch(self, count, normalized=False):
        if int(count) != count or count < 1:
            raise InvalidParameterError(f"count must be a positive integer, got {count!r}")
        G = _goe_from(_raw_gaussian(self.seed, "goe", self.n, int(count)))
        Gt = _antisym_from(_raw_gaussian(self.seed, "antisym", self.n, int(count)))
        M = _combine(G, Gt, self.rho)
        if normalized:
            M /= np.sqrt(self.n)
        return M


def _check_square(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    return A


def _lanczos_top(matvec, n, tol, max_iter, krylov_dim=40):
    """Largest eigenvalue of a symmetric operator by restarted Lanczos.

    Starts from the normalised all-ones vector and keeps full
    reorthogonalisation.  On breakdown (an invariant subspace smaller than
    ``n``) the basis is continued with a fixed pseudo-random direction so
    that a start vector orthogonal to the top eigenvector is not fatal.
    Returns ``(eigenvalue, matvec_count)``.
    """
    m = min(n, krylov_dim)
    v = np.full(n, 1.0 / np.sqrt(n))
    filler = np.random.default_rng(0x5EED)
    used = 0
    theta = None
    while used < max_iter:
        V = np.zeros((m + 1, n))
        alpha = np.zeros(m)
        beta = np.zeros(m)
        V[0] = v
        k = 0
        exhausted = False
        for j in range(m):
            w = matvec(V[j])
            used += 1
            alpha[j] = V[j] @ w
            w = w - alpha[j] * V[j]
            if j > 0:
                w -= beta[j - 1] * V[j - 1]
            w -= V[: j + 1].T @ (V[: j + 1] @ w)
            w -= V[: j + 1].T @ (V[: j + 1] @ w)
            nrm = np.linalg.norm(w)
            k = j + 1
            scale = max(abs(alpha[: j + 1]).max(), 1e-300)
            if nrm <= 1e-13 * scale:
                if k == n:
                    exhausted = True
                    break
                w = filler.standard_normal(n)
                w -= V[: j + 1].T @ (V[: j + 1] @ w)
                w -= V[: j + 1].T @ (V[: j + 1] @ w)
                nrm = np.linalg.norm(w)
                beta[j] = 0.0
            else:
                beta[j] = nrm
            V[j + 1] = w / nrm
            if used >= max_iter:
                break
        T = np.diag(alpha[:k]) + np.diag(beta[: k - 1], 1) + np.diag(beta[: k - 1], -1)
        evals, evecs = np.linalg.eigh(T)
        theta = evals[-1]
        s = evecs[:, -1]
        resid = 0.0 if exhausted else abs(beta[k - 1] * s[-1])
        if resid <= tol * max(abs(theta), 1e-300) or k == n:
            return theta, used
        v = V[:k].T @ s
        v /= np.linalg.norm(v)
    raise ConvergenceError(
        f"Lanczos iteration did not converge within {max_iter} operator applications"
    )


def spectral_norm(A, tol=1e-12, max_iter=10_000):
    """Largest singular value of a square matrix.

    Krylov-accelerated power iteration on ``A^T A`` with a deterministic
    start; ``tol`` bounds the relative Ritz residual of ``A^T A``.
    """
    A = _check_square(A)
    if not A.any():
        return 0.0
    lam, _ = _lanczos_top(lambda x: A.T @ (A @ x), A.shape[0], tol, max_iter)
    return float(np.sqrt(max(lam, 0.0)))


def symmetric_part_top_eigenvalue(A, tol=1e-12, max_iter=10_000):
    """Largest eigenvalue of ``(A + A^T)/2``.

    For a normalised elliptic matrix this tends to ``sqrt(2(1 + rho))``;
    ``I - A/kappa`` has a positive definite symmetric part exactly when
    this value is below ``kappa``.
    """
    A = _check_square(A)
    if not A.any():
        return 0.0
    S = 0.5 * (A + A.T)
    lam, _ = _lanczos_top(lambda x: S @ x, A.shape[0], tol, max_iter)
    return float(lam)
