"""Deterministic Gaussian expectations for density evolution.

Smooth integrands use Gauss-Hermite (probabilists' weights).  Integrands
with known kinks use composite Gauss-Legendre on ``[-L, L]`` in
standardised coordinates, split at the kinks, which restores spectral
accuracy for functions like ``(u + a)_+^2`` where plain Gauss-Hermite
stalls around 1e-4.
"""

import numpy as np

from .errors import QuadratureError

_L = 12.0  # tail mass beyond 12 sd is ~4e-33
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _hermite_rule(order):
    x, w = np.polynomial.hermite_e.hermegauss(order)
    return x, w * _INV_SQRT2PI


def _legendre_rule(order):
    return np.polynomial.legendre.leggauss(order)


def standard_rule(order, kinks=None):
    """Nodes and weights for ``E[g(Z)]``, ``Z ~ N(0, 1)``.

    ``kinks`` may be ``None``/empty (Gauss-Hermite), a 1-D array of kink
    locations, or a 2-D ``(rows, nk)`` array giving a separate split per
    row; in the last case the outputs have a leading ``rows`` axis.
    """
    if kinks is None or np.size(kinks) == 0:
        return _hermite_rule(order)
    k = np.asarray(kinks, dtype=float)
    squeeze = k.ndim == 1
    k = np.atleast_2d(k)
    rows = k.shape[0]
    bp = np.sort(np.clip(k, -_L, _L), axis=1)
    bp = np.concatenate([np.full((rows, 1), -_L), bp, np.full((rows, 1), _L)], axis=1)
    t, tw = _legendre_rule(order)
    half = 0.5 * (bp[:, 1:] - bp[:, :-1])
    mid = 0.5 * (bp[:, 1:] + bp[:, :-1])
    nodes = mid[:, :, None] + half[:, :, None] * t[None, None, :]
    weights = half[:, :, None] * tw[None, None, :] * _INV_SQRT2PI * np.exp(-0.5 * nodes**2)
    nodes = nodes.reshape(rows, -1)
    weights = weights.reshape(rows, -1)
    if squeeze:
        return nodes[0], weights[0]
    return nodes, weights


def _expect(fn, sd, mean, kinks, order):
    if sd == 0:
        return float(fn(np.array([mean]))[0])
    std_kinks = [(c - mean) / sd for c in kinks]
    z, w = standard_rule(order, std_kinks)
    return float(w @ fn(mean + sd * z))


def _check(a, b, what):
    if abs(a - b) > 1e-6:
        raise QuadratureError(f"{what}: order doubling moved the value by {abs(a - b):.3g}")
    return b


def gauss_expect(fn, sd, mean=0.0, kinks=(), order=64, check=True):
    """``E[fn(mean + sd Z)]``; ``fn`` maps arrays to arrays elementwise."""
    val = _expect(fn, sd, mean, kinks, order)
    if check:
        return _check(val, _expect(fn, sd, mean, kinks, 2 * order), "1-D expectation")
    return val


def _expect_pair(fn_i, fn_j, cov, kinks_i, kinks_j, order):
    s11, s12, s22 = float(cov[0][0]), float(cov[0][1]), float(cov[1][1])
    if s11 <= 0.0:
        return float(fn_i(np.zeros(1))[0]) * _expect(fn_j, np.sqrt(max(s22, 0.0)), 0.0, kinks_j, order)
    a = np.sqrt(s11)
    b = s12 / a
    c2 = s22 - b * b
    c = np.sqrt(c2) if c2 > 1e-14 * max(s22, 1e-300) else 0.0
    outer_kinks = [ki / a for ki in kinks_i]
    if c == 0.0 and b != 0.0:
        # rank-one marginal: Z2 = b xi, so its kinks live on the outer axis
        outer_kinks += [kj / b for kj in kinks_j]
    x1, w1 = standard_rule(order, outer_kinks)
    m = b * x1
    if c == 0.0:
        inner = fn_j(m)
    else:
        if kinks_j:
            rows = (np.asarray(kinks_j, dtype=float)[None, :] - m[:, None]) / c
            z2, w2 = standard_rule(order, rows)
            inner = np.sum(w2 * fn_j(m[:, None] + c * z2), axis=1)
        else:
            z2, w2 = standard_rule(order)
            inner = fn_j(m[:, None] + c * z2[None, :]) @ w2
    return float(w1 @ (fn_i(a * x1) * inner))


def gauss_expect_pair(fn_i, fn_j, cov, kinks_i=(), kinks_j=(), order=64, check=True):
    """``E[fn_i(Z1) fn_j(Z2)]`` for a centred pair with 2x2 covariance ``cov``.

    The pair is parameterised through the Cholesky factor of ``cov``;
    a rank-one ``cov`` falls back to a single Gaussian axis.
    """
    val = _expect_pair(fn_i, fn_j, cov, list(kinks_i), list(kinks_j), order)
    if check:
        hi = _expect_pair(fn_i, fn_j, cov, list(kinks_i), list(kinks_j), 2 * order)
        return _check(val, hi, "2-D expectation")
    return val
