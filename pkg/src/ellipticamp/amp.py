"""Elliptic approximate message passing.

The recursion is

    u^1     = A h_0(u^0, B)
    u^{k+1} = A h_k(u^k, B) - rho * <d/du h_k(u^k, B)>_n * h_{k-1}(u^{k-1}, B)

where ``<.>_n`` is the arithmetic mean over the ``n`` coordinates.  With
``rho = 1`` and a symmetric ``A`` this is the usual GOE scheme; with
``rho = 0`` the memory term disappears.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError, NonFiniteError


@dataclass(frozen=True)
class ActivationFamily:
    """Separable activations ``h_k(u, b_1..b_p)`` and their ``u``-derivatives.

    ``func(k, u, B)`` and ``deriv(k, u, B)`` take ``u`` of shape ``(m,)``
    and ``B`` of shape ``(m, p)`` and return arrays of shape ``(m,)``.
    ``kinks(k, b)``, if given, lists the ``u`` locations (for one parameter
    row ``b``) where ``h_k`` is not smooth; density evolution splits its
    quadrature there.
    """

    func: Callable[[int, np.ndarray, np.ndarray], np.ndarray]
    deriv: Callable[[int, np.ndarray, np.ndarray], np.ndarray]
    p: int = 1
    kinks: Optional[Callable[[int, np.ndarray], Sequence[float]]] = None
    name: str = "custom"

    def h(self, k, u, B):
        return np.asarray(self.func(k, u, B), dtype=float)

    def dh(self, k, u, B):
        return np.asarray(self.deriv(k, u, B), dtype=float)

    def kink_points(self, k, b):
        if self.kinks is None:
            return ()
        return tuple(float(c) for c in self.kinks(k, np.asarray(b, dtype=float)))


def lv_activation(delta):
    """``h_k(u, a) = (u + a)_+ / delta`` for every ``k``.

    The derivative at the kink ``u + a = 0`` is taken to be 0.
    """
    delta = float(delta)
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")

    def func(k, u, B):
        return np.maximum(u + B[:, 0], 0.0) / delta

    def deriv(k, u, B):
        return (u + B[:, 0] > 0).astype(float) / delta

    def kinks(k, b):
        return (-b[0],)

    return ActivationFamily(func, deriv, p=1, kinks=kinks, name=f"lv(delta={delta:g})")


def identity_activation(p=1):
    return ActivationFamily(
        lambda k, u, B: np.array(u, dtype=float),
        lambda k, u, B: np.ones_like(u, dtype=float),
        p=p,
        name="identity",
    )


def constant_activation(c, p=1):
    c = float(c)
    return ActivationFamily(
        lambda k, u, B: np.full(np.shape(u), c),
        lambda k, u, B: np.zeros(np.shape(u)),
        p=p,
        name=f"constant({c:g})",
    )


def lipschitz_probe(fam, k, rng, pairs=1000, scale=3.0):
    """Largest finite-difference slope of ``h_k`` over random pairs of points.

    Pairs are drawn in ``R^{p+1}``; the slope is ``|h(x) - h(y)| / |x - y|``.
    """
    x = rng.normal(scale=scale, size=(pairs, fam.p + 1))
    y = x + rng.normal(scale=scale, size=x.shape) * rng.uniform(1e-3, 1, size=(pairs, 1))
    hx = fam.h(k, x[:, 0], x[:, 1:])
    hy = fam.h(k, y[:, 0], y[:, 1:])
    return float(np.max(np.abs(hx - hy) / np.linalg.norm(x - y, axis=1)))


def derivative_probe(fam, k, u, B, step=1e-6):
    """Max gap between ``dh`` and a central difference of ``h`` in ``u``."""
    u = np.asarray(u, dtype=float)
    B = np.asarray(B, dtype=float)
    fd = (fam.h(k, u + step, B) - fam.h(k, u - step, B)) / (2 * step)
    return float(np.max(np.abs(fd - fam.dh(k, u, B))))


def _as_param_matrix(B, n):
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.ndim != 2 or B.shape[0] != n:
        raise DimensionMismatchError(f"parameter matrix has shape {B.shape}, expected ({n}, p)")
    return B


def _check_operands(A, u, B):
    A = np.asarray(A, dtype=float)
    u = np.asarray(u, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"A must be square, got shape {A.shape}")
    if u.shape != (A.shape[1],):
        raise DimensionMismatchError(f"vector of length {u.shape} does not match A {A.shape}")
    return A, u, _as_param_matrix(B, A.shape[0])


def onsager_coefficient(u, B, k, fam):
    """``d_k = (1/n) sum_i dh_k(u_i, B_i)``."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise DimensionMismatchError("u must be a vector")
    B = _as_param_matrix(B, u.shape[0])
    return float(np.mean(fam.dh(k, u, B)))


def amp_init(A, u0, B, fam):
    """First iterate ``u^1 = A h_0(u^0, B)``; no memory term."""
    A, u0, B = _check_operands(A, u0, B)
    out = A @ fam.h(0, u0, B)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("non-finite value in u^1", iteration=1)
    return out


def _step_kernel(A, q_k, q_prev, rho, d_k):
    return A @ q_k - (rho * d_k) * q_prev


def amp_step(A, u_k, u_prev, B, k, rho, fam):
    """One step of the recursion, returning ``u^{k+1}`` (requires ``k >= 1``)."""
    if k < 1:
        raise InvalidParameterError("amp_step needs k >= 1; use amp_init for the first step")
    A, u_k, B = _check_operands(A, u_k, B)
    u_prev = np.asarray(u_prev, dtype=float)
    if u_prev.shape != u_k.shape:
        raise DimensionMismatchError("u^k and u^{k-1} have different lengths")
    q_k = fam.h(k, u_k, B)
    q_prev = fam.h(k - 1, u_prev, B)
    d_k = float(np.mean(fam.dh(k, u_k, B)))
    out = _step_kernel(A, q_k, q_prev, float(rho), d_k)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError(f"non-finite value in u^{k + 1}", iteration=k + 1)
    return out


@dataclass
class AMPTrace:
    """Dense record of an AMP run.

    ``u[k-1]`` holds ``u^k`` for ``k = 1..K``; ``q[k]`` holds
    ``h_k(u^k, B)`` for ``k = 0..K-1`` (with ``u^0`` the initial vector);
    ``d[k]`` is the Onsager coefficient used in step ``k``, ``d[0] = 0``.
    """

    u0: np.ndarray
    B: np.ndarray
    rho: float
    u: np.ndarray
    q: np.ndarray
    d: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def K(self):
        return self.u.shape[0]

    def iterate(self, k):
        """``u^k`` for ``k = 0..K``."""
        return self.u0 if k == 0 else self.u[k - 1]

    def Q(self, k):
        """``[q^0, ..., q^{k-1}]`` as an ``n x k`` matrix."""
        return self.q[:k].T

    def U(self, k):
        """``[u^1, ..., u^k]`` as an ``n x k`` matrix."""
        return self.u[:k].T


def amp_run(A, B, u0, fam, rho, K):
    """Run ``K`` AMP steps from ``u0`` and keep every iterate."""
    if int(K) != K or K < 1:
        raise InvalidParameterError(f"K must be a positive integer, got {K!r}")
    A, u0, B = _check_operands(A, u0, B)
    n = A.shape[0]
    rho = float(rho)
    u = np.empty((K, n))
    q = np.empty((K, n))
    d = np.zeros(K)
    q[0] = fam.h(0, u0, B)
    u[0] = A @ q[0]
    if not np.all(np.isfinite(u[0])):
        raise NonFiniteError("non-finite value in u^1", iteration=1)
    for k in range(1, K):
        q[k] = fam.h(k, u[k - 1], B)
        d[k] = float(np.mean(fam.dh(k, u[k - 1], B)))
        u[k] = _step_kernel(A, q[k], q[k - 1], rho, d[k])
        if not np.all(np.isfinite(u[k])):
            raise NonFiniteError(f"non-finite value in u^{k + 1}", iteration=k + 1)
    return AMPTrace(u0=u0.copy(), B=B.copy(), rho=rho, u=u, q=q, d=d)
