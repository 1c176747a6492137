"""The three-equation system for (delta, sigma, gamma).

Given ``kappa``, ``rho`` and an atomic law for the growth rate ``r``,

    kappa   = delta + rho * gamma / delta
    sigma^2 = E[(sigma Z + r)_+^2] / delta^2
    gamma   = P[sigma Z + r > 0]

With ``x = -1/sigma`` and the auxiliary functions

    Q(x) = P[Z > x],   f(x) = (1 + x^2) Q(x) - x phi(x),

the last two equations read ``delta^2 = E f(r x)`` and
``gamma = E Q(r x)``.  For fixed ``delta > 1/sqrt(2)`` the first has a
unique root ``sigma(delta)``; then ``delta -> delta + rho gamma(delta)/delta``
is strictly increasing, so the outer equation is solved by bisection too.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .errors import InvalidParameterError, NoSolutionError, OutOfDomainError

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)
DELTA_MIN = _INV_SQRT2


@dataclass(frozen=True)
class GrowthLaw:
    """Finite atomic law of a nonnegative growth rate.

    The law may not be the point mass at 0.
    """

    values: tuple
    weights: tuple

    def __init__(self, values, weights=None):
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if weights is None:
            weights = np.full(values.shape, 1.0 / values.size)
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        if values.ndim != 1 or values.shape != weights.shape or values.size == 0:
            raise InvalidParameterError("values and weights must be equal-length 1-D sequences")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(weights))):
            raise InvalidParameterError("growth law has non-finite entries")
        if np.any(values < 0):
            raise InvalidParameterError("growth rates must be nonnegative")
        if np.any(weights <= 0):
            raise InvalidParameterError("atom weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidParameterError(f"weights sum to {weights.sum()!r}, not 1")
        if not np.any(values > 0):
            raise InvalidParameterError("growth law is the point mass at 0")
        object.__setattr__(self, "values", tuple(values.tolist()))
        object.__setattr__(self, "weights", tuple(weights.tolist()))

    @classmethod
    def constant(cls, r):
        return cls([r], [1.0])

    @classmethod
    def mixture(cls, laws, proportions):
        """``sum_j c_j L(r_j)`` for block laws ``r_j`` with proportions ``c_j``."""
        vals, wts = [], []
        for law, c in zip(laws, proportions):
            vals.extend(law.values)
            wts.extend(c * w for w in law.weights)
        wts = np.asarray(wts)
        return cls(vals, wts / wts.sum())

    @property
    def r(self):
        return np.asarray(self.values)

    @property
    def w(self):
        return np.asarray(self.weights)

    def mean(self):
        return float(self.w @ self.r)

    def scaled(self, factor):
        """Law of ``factor * r``."""
        return GrowthLaw(self.r * factor, self.w)

    def to_dict(self):
        return {"values": list(self.values), "weights": list(self.weights)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["values"], d.get("weights"))


def q_tail(x):
    """Standard normal upper tail ``P[Z > x]``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) * _INV_SQRT2)


def normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return _INV_SQRT2PI * np.exp(-0.5 * x * x)


def f_aux(x):
    """``f(x) = (1 + x^2) Q(x) - x phi(x) = E[(Z - x)_+^2]``."""
    x = np.asarray(x, dtype=float)
    return (1.0 + x * x) * q_tail(x) - x * normal_pdf(x)


def f_aux_prime(x):
    x = np.asarray(x, dtype=float)
    return 2.0 * (x * q_tail(x) - normal_pdf(x))


def positive_part_second_moment(sigma, r, w):
    """``E[(sigma Z + r)_+^2]`` for atomic ``r``; closed form, no integration."""
    r = np.asarray(r, dtype=float)
    return float(np.asarray(w) @ (sigma * sigma * f_aux(-r / sigma)))


def _check_delta(delta):
    if not delta > DELTA_MIN:
        raise OutOfDomainError(f"delta must exceed 1/sqrt(2), got {delta}")


def solve_sigma(delta, law):
    """Unique ``sigma > 0`` with ``delta^2 = E f(-r/sigma)``.

    ``E f(-r/sigma)`` decreases from ``+inf`` (sigma -> 0) to ``1/2``
    (sigma -> inf), so a bracket is grown geometrically and then bisected.
    """
    delta = float(delta)
    _check_delta(delta)
    target = delta * delta
    r, w = law.r, law.w

    def g(s):
        return float(w @ f_aux(-r / s)) - target

    lo = hi = max(law.mean(), 1e-3)
    for _ in range(200):
        if g(lo) > 0:
            break
        lo *= 0.5
    else:
        raise NoSolutionError("could not bracket sigma from below")
    for _ in range(200):
        if g(hi) < 0:
            break
        hi *= 2.0
    else:
        raise NoSolutionError(f"bracket expansion for sigma failed at delta={delta}")
    while True:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) < 1e-12 or hi - lo < 1e-14 * mid or mid in (lo, hi):
            return mid
        if gm > 0:
            lo = mid
        else:
            hi = mid


def gamma_of(delta, law, sigma=None):
    """``gamma(delta) = E Q(-r / sigma(delta))``."""
    if sigma is None:
        sigma = solve_sigma(delta, law)
    return float(law.w @ q_tail(-law.r / sigma))


def x_of(delta, law):
    return -1.0 / solve_sigma(delta, law)


def x_derivative(delta, law):
    """``x'(delta) = delta x / (delta^2 - E Q(r x))``."""
    delta = float(delta)
    x = x_of(delta, law)
    gamma = float(law.w @ q_tail(law.r * x))
    denom = delta * delta - gamma
    assert denom > 0, "gamma(delta) < delta^2 violated"
    return delta * x / denom


def gamma_derivative(delta, law):
    """``gamma'(delta) = -x'(delta) E[r phi(r x)]``."""
    x = x_of(delta, law)
    return -x_derivative(delta, law) * float(law.w @ (law.r * normal_pdf(law.r * x)))


def h_of_delta(delta, rho, law):
    """``delta + rho gamma(delta) / delta``; strictly increasing in ``delta``."""
    return delta + rho * gamma_of(delta, law) / delta


@dataclass(frozen=True)
class SystemSolution:
    delta: float
    sigma: float
    gamma: float
    kappa: float
    rho: float
    law: GrowthLaw = field(repr=False)
    residuals: tuple = ()

    @property
    def scale(self):
        """``kappa / delta``, which equals ``1 + rho gamma / delta^2``."""
        return self.kappa / self.delta

    def to_dict(self):
        return {
            "delta": self.delta,
            "sigma": self.sigma,
            "gamma": self.gamma,
            "kappa": self.kappa,
            "rho": self.rho,
            "residuals": list(self.residuals),
        }


def system_residuals(delta, sigma, gamma, kappa, rho, law):
    """Absolute residuals of the three equations, in order."""
    r, w = law.r, law.w
    res_delta = abs(delta + rho * gamma / delta - kappa)
    res_sigma = abs(sigma * sigma - positive_part_second_moment(sigma, r, w) / (delta * delta))
    res_gamma = abs(gamma - float(w @ q_tail(-r / sigma)))
    return (res_delta, res_sigma, res_gamma)


def kappa_threshold(rho):
    """Smallest admissible ``kappa`` (excluded): ``(1 + rho)/sqrt(2)``."""
    return (1.0 + rho) * _INV_SQRT2


def stability_threshold(rho):
    """``sqrt(2(1 + rho))``: above it a unique stable equilibrium exists eventually."""
    return math.sqrt(2.0 * (1.0 + rho))


def solve_system(kappa, rho, law):
    """Solve for ``(delta, sigma, gamma)``.

    Requires ``kappa > (1 + rho)/sqrt(2)``.  Between that bound and
    ``sqrt(2(1 + rho))`` the system is solvable but a stable equilibrium is
    not guaranteed; a ``RuntimeWarning`` is issued there.
    """
    kappa = float(kappa)
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise InvalidParameterError(f"rho must lie in [-1, 1], got {rho}")
    if not kappa > kappa_threshold(rho):
        raise OutOfDomainError(
            f"kappa={kappa} must exceed (1 + rho)/sqrt(2) = {kappa_threshold(rho)}"
        )
    if kappa <= stability_threshold(rho):
        warnings.warn(
            f"kappa={kappa} <= sqrt(2(1+rho))={stability_threshold(rho):.6g}: "
            "system solvable but a stable equilibrium is not guaranteed",
            RuntimeWarning,
            stacklevel=2,
        )

    def h(d):
        return h_of_delta(d, rho, law) - kappa

    gap = 1e-6
    lo = DELTA_MIN + gap
    while h(lo) >= 0:
        gap *= 0.5
        if gap < 1e-15:
            raise NoSolutionError("could not bracket delta from below")
        lo = DELTA_MIN + gap
    hi = max(kappa, 2.0)
    for _ in range(200):
        if h(hi) > 0:
            break
        hi *= 2.0
    else:
        raise NoSolutionError("bracket expansion for delta failed")
    while True:
        mid = 0.5 * (lo + hi)
        hm = h(mid)
        if hm == 0.0 or hi - lo < 4e-16 * mid or mid in (lo, hi):
            break
        if hm > 0:
            hi = mid
        else:
            lo = mid
    delta = mid
    sigma = solve_sigma(delta, law)
    gamma = gamma_of(delta, law, sigma)
    res = system_residuals(delta, sigma, gamma, kappa, rho, law)
    return SystemSolution(delta, sigma, gamma, kappa, rho, law, res)
