"""Lotka-Volterra equilibria as linear complementarity problems.

The equilibrium ``x`` of ``dx/dt = x * (r - (I - Sigma) x)`` solves
LCP(I - Sigma, -r):

    x >= 0,   (I - Sigma) x - r >= 0,   x . ((I - Sigma) x - r) = 0.

Two independent solvers are provided: Lemke's complementary pivoting and
the Picard iteration ``z <- Sigma z_+ + r`` (``x = z_+``), which contracts
whenever ``||Sigma|| < 1``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractionViolatedError,
    ConvergenceError,
    DimensionMismatchError,
    InvalidInputError,
    InvalidParameterError,
    NoSolutionError,
)
from .rand_matrix import spectral_norm, symmetric_part_top_eigenvalue

KKT_TOL = 1e-8


@dataclass(frozen=True)
class LCPInstance:
    """Find ``x >= 0`` with ``Mx + q >= 0`` and ``x.(Mx + q) = 0``."""

    M: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or q.shape != (M.shape[0],):
            raise DimensionMismatchError(f"incompatible shapes M{M.shape}, q{q.shape}")
        if not (np.all(np.isfinite(M)) and np.all(np.isfinite(q))):
            raise InvalidInputError("LCP data must be finite")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "q", q)

    @classmethod
    def lotka_volterra(cls, Sigma, r):
        Sigma = np.asarray(Sigma, dtype=float)
        return cls(np.eye(Sigma.shape[0]) - Sigma, -np.asarray(r, dtype=float))

    def residuals(self, x):
        """``(negativity, complementarity, infeasibility)`` maxima for ``x``."""
        w = self.M @ x + self.q
        return (
            float(max(0.0, -x.min())),
            float(np.max(np.abs(x * w))),
            float(max(0.0, -w.min())),
        )


def _lex_argmin(rows, T, rhs, col, n):
    """Lexicographic minimum ratio among candidate ``rows``.

    Compares ``(rhs_i, B^{-1}_i) / col_i``; ``B^{-1}`` sits in the first
    ``n`` tableau columns.  Remaining ties go to the lowest row index.
    """
    cand = np.asarray(rows)
    ratios = rhs[cand] / col[cand]
    best = ratios.min()
    tie_tol = 1e-12 * max(1.0, abs(best))
    cand = cand[ratios <= best + tie_tol]
    j = 0
    while cand.size > 1 and j < n:
        vals = T[cand, j] / col[cand]
        best = vals.min()
        cand = cand[vals <= best + 1e-12 * max(1.0, abs(best))]
        j += 1
    return int(cand.min())


def lemke(inst, max_pivots=None):
    """Solve an LCP by Lemke's method with covering vector ``1``.

    The final basis is polished by solving the complementary linear system
    on the support, which removes the drift accumulated over pivots.
    """
    M, q = inst.M, inst.q
    n = q.size
    if np.all(q >= 0):
        return np.zeros(n)
    if max_pivots is None:
        max_pivots = 50 * (n + 1)
    # tableau columns: w_1..w_n, z_1..z_n, z_0 | rhs   for  w - M z - z0 1 = q
    T = np.hstack([np.eye(n), -M, -np.ones((n, 1))])
    rhs = q.copy()
    basis = np.arange(n)  # basic variable per row: i < n is w_i, n + i is z_i, 2n is z_0
    z0 = 2 * n

    def pivot(row, col):
        piv = T[row, col]
        T[row] /= piv
        rhs[row] /= piv
        c = T[:, col].copy()
        c[row] = 0.0
        T[:] -= np.outer(c, T[row])
        rhs[:] -= c * rhs[row]
        basis[row] = col

    qmin = rhs.min()
    row = _lex_argmin(np.flatnonzero(rhs <= qmin + 1e-12 * max(1.0, abs(qmin))), -T, -rhs, np.ones(n), n)
    leaving = basis[row]
    pivot(row, z0)
    for _ in range(max_pivots):
        entering = leaving + n if leaving < n else leaving - n
        col = T[:, entering]
        scale = max(1.0, np.abs(col).max())
        rows = np.flatnonzero(col > 1e-12 * scale)
        if rows.size == 0:
            raise NoSolutionError("Lemke's method ended on a secondary ray")
        row = _lex_argmin(rows, T, rhs, col, n)
        leaving = basis[row]
        pivot(row, entering)
        if leaving == z0:
            break
    else:
        raise ConvergenceError(f"Lemke's method exceeded {max_pivots} pivots")
    x = np.zeros(n)
    zb = basis >= n
    idx = basis[zb] - n
    x[idx] = rhs[zb]
    return _polish(inst, x, idx)


def _polish(inst, x, support):
    if support.size == 0:
        return np.maximum(x, 0.0)
    S = np.sort(support)
    try:
        xs = np.linalg.solve(inst.M[np.ix_(S, S)], -inst.q[S])
    except np.linalg.LinAlgError:
        return np.maximum(x, 0.0)
    y = np.zeros_like(x)
    y[S] = xs
    if y.min() >= -1e-12 and max(inst.residuals(np.maximum(y, 0))) <= max(inst.residuals(np.maximum(x, 0))):
        return np.maximum(y, 0.0)
    return np.maximum(x, 0.0)


def contraction_solve(Sigma, r, tol=1e-12, max_iter=100_000, norm=None):
    """Fixed point of ``z = Sigma z_+ + r`` by Picard iteration from ``z = 0``.

    ``norm`` may pass a precomputed ``||Sigma||``.
    """
    Sigma = np.asarray(Sigma, dtype=float)
    r = np.asarray(r, dtype=float)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1] or r.shape != (Sigma.shape[0],):
        raise DimensionMismatchError(f"incompatible shapes Sigma{Sigma.shape}, r{r.shape}")
    if norm is None:
        norm = spectral_norm(Sigma)
    if not norm < 1.0:
        raise ContractionViolatedError(f"||Sigma|| = {norm:.6g} is not below 1")
    z = np.zeros_like(r)
    for _ in range(max_iter):
        z_new = Sigma @ np.maximum(z, 0.0) + r
        if np.max(np.abs(z_new - z)) <= tol:
            return z_new
        z = z_new
    raise ConvergenceError(f"Picard iteration did not converge in {max_iter} steps")


@dataclass
class EquilibriumResult:
    x_star: np.ndarray
    gate_passed: bool
    gate_value: float
    solver: str
    residuals: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.x_star.size


GATES = ("norm", "symmetric")
SOLVERS = ("auto", "contraction", "lemke")


def equilibrium(A, kappa, r, solver="auto", gate="norm", verify=False, norm=None, sym_top=None):
    """Equilibrium ``x*`` of the LV system with ``Sigma = A / kappa``.

    ``gate="norm"`` uses ``||A|| / kappa < 1``: when it fails ``x* = 0``.
    ``gate="symmetric"`` uses the largest eigenvalue of ``(A + A^T)/2``
    instead, i.e. positive definiteness of the symmetric part of
    ``I - Sigma``, under which the LCP has exactly one solution.

    ``solver="auto"`` runs the contraction when ``||Sigma|| < 1`` and
    Lemke otherwise.  With ``verify=True`` both solvers run when possible
    and their max-norm gap is reported.

    ``norm`` and ``sym_top`` accept precomputed ``||A||`` and top eigenvalue
    of ``(A + A^T)/2`` so that a sweep over ``kappa`` reuses them.
    """
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be positive, got {kappa}")
    if gate not in GATES:
        raise InvalidParameterError(f"unknown gate {gate!r}")
    if solver not in SOLVERS:
        raise InvalidParameterError(f"unknown solver {solver!r}")
    A = np.asarray(A, dtype=float)
    r = np.asarray(r, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or r.shape != (A.shape[0],):
        raise DimensionMismatchError(f"incompatible shapes A{A.shape}, r{r.shape}")
    n = r.size
    if norm is None:
        norm = spectral_norm(A)
    if gate == "norm":
        gate_value = norm / kappa
    else:
        if sym_top is None:
            sym_top = symmetric_part_top_eigenvalue(A)
        gate_value = sym_top / kappa
    if not gate_value < 1.0:
        return EquilibriumResult(np.zeros(n), False, gate_value, "none", {})
    Sigma = A / kappa
    contracting = norm / kappa < 1.0
    if solver == "auto":
        solver = "contraction" if contracting else "lemke"
    inst = LCPInstance.lotka_volterra(Sigma, r)
    if solver == "contraction":
        x = np.maximum(contraction_solve(Sigma, r, norm=norm / kappa), 0.0)
    else:
        x = lemke(inst)
    neg, comp, infeas = inst.residuals(x)
    res = {"negativity": neg, "complementarity": comp, "infeasibility": infeas}
    if verify:
        other = lemke(inst) if solver == "contraction" else (
            np.maximum(contraction_solve(Sigma, r, norm=norm / kappa), 0.0) if contracting else None
        )
        if other is not None:
            res["solver_gap"] = float(np.max(np.abs(other - x)))
    if max(neg, comp, infeas) > KKT_TOL:
        raise ConvergenceError(f"equilibrium KKT residuals too large: {res}")
    return EquilibriumResult(x, True, gate_value, solver, res)
