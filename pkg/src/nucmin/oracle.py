"""Iterative and randomized cross-checks for the closed-form solvers.

Nothing in here calls :mod:`nucmin.closed_form`. The ADMM solvers take an
optional ``reference`` minimizer only to report how far they land from it.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, Infeasible, MaxIterationsExceeded, NoNullSpace, ZeroDictionary
from .linalg import (
    DEFAULT_TOLERANCES,
    as_matrix,
    frobenius,
    nuclear_norm,
    orthogonal_complement,
    relative_distance,
    require_semi_orthogonal,
)

log = logging.getLogger(__name__)

EQUALITY_TOL = 1e-10
LEMMA1_RTOL = 1e-8


@dataclass(frozen=True)
class AdmmParams:
    """Penalty schedule and stopping rule for the ADMM oracle.

    The penalty starts at ``rho``, is multiplied by ``rho_scale`` every
    iteration and is capped at ``rho_max``.
    """

    rho: float = 1.0
    rho_scale: float = 1.05
    max_iter: int = 2000
    stop_tol: float = 1e-9
    rho_max: float = 1e10

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.rho_scale >= 1:
            raise ValueError("rho_scale must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.stop_tol > 0:
            raise ValueError("stop_tol must be positive")
        if not self.rho_max >= self.rho:
            raise ValueError("rho_max must be >= rho")


@dataclass(eq=False)
class OracleReport:
    iterate: np.ndarray
    objective_trace: list  # nuclear norm of each iterate projected onto the feasible set
    converged: bool
    iterations: int
    primal_residual: float
    distance_to_reference: float = None
    residual_trace: list = field(default_factory=list)
    stop_tol: float = None


def svt_shrink(M, tau):
    """Singular value thresholding, the proximal map of ``tau * ||.||_*``.

    Returns ``U diag(max(sigma - tau, 0)) V^T``, the unique minimizer of
    ``tau ||Z||_* + 0.5 ||Z - M||_F^2``.
    """
    return _svt(as_matrix(M), tau)[0]


def _svt(M, tau):
    if not tau > 0:
        raise ValueError("tau must be positive")
    if M.size == 0:
        return M.copy(), 0.0
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    s = s - tau
    r = int(np.count_nonzero(s > 0))
    return (U[:, :r] * s[:r]) @ Vt[:r], float(np.sum(s[:r]))


def _row_whitener(A):
    """Complete orthogonal decomposition ``A = Q L G`` by pivoted QR.

    ``Q`` (m x r) and ``G^T`` (k x r) have orthonormal columns and ``L`` is
    r x r lower triangular, so for ``X`` in ``range(A)`` the constraint
    ``X = A Z`` is equivalent to ``L^{-1} Q^T X = G Z`` with orthonormal rows.
    """
    m, k = A.shape
    Q, R, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0:
        return Q[:, :0], np.zeros((0, 0)), np.zeros((0, k))
    r = int(np.count_nonzero(diag > diag[0] * max(m, k) * np.finfo(np.float64).eps))
    Rr = np.zeros((r, k))
    Rr[:, perm] = R[:r]
    # Rr^T = Q2 T  =>  Rr = T^T Q2^T
    Q2, T = np.linalg.qr(Rr.T)
    return Q[:, :r], T.T, Q2.T


def _whiten_data(L, Q, X):
    return scipy.linalg.solve_triangular(L, Q.T @ X, lower=True)


def _admm(X, A, B, params, reference):
    """ADMM on ``min ||J||_*  s.t.  J = Z,  X = A Z B`` (``B=None`` means identity).

    The linear constraint is applied in whitened form ``Xw = Ga Z Gb^T`` to
    keep the Z-update well conditioned. The Z-update solves
    ``Ga^T Ga Z Gb^T Gb + Z = rhs`` through the eigendecompositions of the
    two Gram matrices.
    """
    Qa, La, Ga = _row_whitener(A)
    if Ga.shape[0] == 0:
        raise ZeroDictionary("dictionary A is numerically zero")
    Xw = _whiten_data(La, Qa, X)
    if B is not None:
        Qb, Lb, Gb = _row_whitener(B.T)
        if Gb.shape[0] == 0:
            raise ZeroDictionary("dictionary B is numerically zero")
        Xw = _whiten_data(Lb, Qb, Xw.T).T
        lam_b, Eb = np.linalg.eigh(Gb.T @ Gb)
    else:
        Gb = None
        lam_b, Eb = np.ones(X.shape[1]), None
    lam_a, Ea = np.linalg.eigh(Ga.T @ Ga)
    denom = 1.0 + np.outer(lam_a, lam_b)

    def forward(Z):
        out = Ga @ Z
        return out if Gb is None else out @ Gb.T

    def adjoint(W):
        out = Ga.T @ W
        return out if Gb is None else out @ Gb

    def solve_z(rhs):
        rhs = Ea.T @ rhs
        if Eb is not None:
            rhs = rhs @ Eb
        Z = Ea @ (rhs / denom)
        return Z if Eb is None else Z @ Eb.T

    def residual(Z):
        AZ = A @ Z
        return X - (AZ if B is None else AZ @ B)

    shape = (A.shape[1], X.shape[1] if B is None else B.shape[0])
    Z = np.zeros(shape)
    J = np.zeros(shape)
    Y1 = np.zeros_like(Xw)
    Y2 = np.zeros(shape)
    mu = params.rho
    scale = 1.0 + frobenius(X)
    objective_trace, residual_trace = [], []
    converged = False
    primal = np.inf
    it = 0
    for it in range(1, params.max_iter + 1):
        J, _ = _svt(Z + Y2 / mu, 1.0 / mu)
        Z_prev = Z
        Z = solve_z(adjoint(Xw + Y1 / mu) + J - Y2 / mu)
        r_lin = Xw - forward(Z)
        r_split = Z - J
        Y1 += mu * r_lin
        Y2 += mu * r_split
        mu = min(mu * params.rho_scale, params.rho_max)

        primal = max(frobenius(residual(Z)), frobenius(r_split)) / scale
        change = frobenius(Z - Z_prev) / (1.0 + frobenius(Z))
        # orthogonal projection onto the feasible set (Ga, Gb have orthonormal rows)
        objective_trace.append(nuclear_norm(Z + adjoint(r_lin)))
        residual_trace.append(primal)
        if primal <= params.stop_tol and change <= params.stop_tol:
            converged = True
            break

    log.debug("admm finished after %d iterations, residual %.3e", it, primal)
    dist = None if reference is None else relative_distance(Z, as_matrix(reference, "reference"))
    return OracleReport(Z, objective_trace, converged, it, primal, dist, residual_trace, params.stop_tol)


def _finish(report, raise_on_failure):
    if raise_on_failure and not report.converged:
        raise MaxIterationsExceeded(
            f"ADMM did not converge in {report.iterations} iterations "
            f"(residual {report.primal_residual:.3e})",
            report,
        )
    return report


def _range_residual(X, Q):
    return frobenius(X - Q @ (Q.T @ X)) / (1.0 + frobenius(X))


def admm_solve_lrr(X, A, params=AdmmParams(), reference=None, tol=DEFAULT_TOLERANCES, raise_on_failure=False):
    """Iteratively solve ``min ||Z||_*  s.t.  X = A Z``.

    Parameters
    ----------
    X : array_like, shape (m, n)
    A : array_like, shape (m, k)
    params : AdmmParams
    reference : array_like, optional
        Expected minimizer; fills ``distance_to_reference``.
    tol : Tolerances
        Only ``feas_tol`` is used, for the up-front feasibility test.
    raise_on_failure : bool
        Raise :class:`MaxIterationsExceeded` instead of returning an
        unconverged report.

    Returns
    -------
    OracleReport
    """
    X = as_matrix(X, "X")
    A = as_matrix(A, "A")
    if X.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but A has {A.shape[0]}")
    Qa = _row_whitener(A)[0]
    if Qa.shape[1] == 0:
        raise ZeroDictionary("dictionary A is numerically zero")
    if _range_residual(X, Qa) > tol.feas_tol:
        raise Infeasible("X is not in the column space of A")
    return _finish(_admm(X, A, None, params, reference), raise_on_failure)


def admm_solve_azb(X, A, B, params=AdmmParams(), reference=None, tol=DEFAULT_TOLERANCES, raise_on_failure=False):
    """Iteratively solve ``min ||Z||_*  s.t.  X = A Z B``; see :func:`admm_solve_lrr`."""
    X = as_matrix(X, "X")
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if X.shape[0] != A.shape[0] or X.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"incompatible shapes X {X.shape}, A {A.shape}, B {B.shape}")
    Qa = _row_whitener(A)[0]
    Qb = _row_whitener(B.T)[0]
    if Qa.shape[1] == 0 or Qb.shape[1] == 0:
        raise ZeroDictionary("dictionary A or B is numerically zero")
    inner = Qa @ (Qa.T @ X @ Qb) @ Qb.T
    if frobenius(X - inner) / (1.0 + frobenius(X)) > tol.feas_tol:
        raise Infeasible("X = A Z B has no solution")
    return _finish(_admm(X, A, B, params, reference), raise_on_failure)


def _null_basis(A):
    # right singular vectors past the numerical rank
    m, k = A.shape
    if A.size == 0 or not np.any(A):
        return np.eye(k)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    r = int(np.count_nonzero(s > s[0] * max(m, k) * np.finfo(np.float64).eps))
    return Vt[r:].T


def _unit(H):
    return H / frobenius(H)


def feasible_perturbation_lrr(A, shape_of_Z, seed, tol=DEFAULT_TOLERANCES):
    """Random unit-Frobenius ``N`` of shape `shape_of_Z` with ``A @ N = 0``.

    Raises
    ------
    NoNullSpace
        If `A` has full column rank, so no such ``N`` exists.
    """
    A = as_matrix(A, "A")
    k, n = shape_of_Z
    if k != A.shape[1]:
        raise DimensionMismatch(f"Z needs {A.shape[1]} rows, got {k}")
    basis = _null_basis(A)
    if basis.shape[1] == 0 or n == 0:
        raise NoNullSpace("A has full column rank; X = A Z has a single feasible point")
    rng = np.random.default_rng(seed)
    N = basis @ rng.standard_normal((basis.shape[1], n))
    return _unit(N)


def feasible_perturbation_semiorthogonal(U, V, shape_of_Z, seed):
    """Random unit-Frobenius ``H`` with ``U^T H V = 0``.

    ``H`` mixes the three blocks ``U_perp G1 V^T``, ``U G2 V_perp^T`` and
    ``U_perp G3 V_perp^T``; whichever exist for the given shapes.
    """
    U = require_semi_orthogonal(U, "U")
    V = require_semi_orthogonal(V, "V")
    if tuple(shape_of_Z) != (U.shape[0], V.shape[0]):
        raise DimensionMismatch(f"Z must have shape {(U.shape[0], V.shape[0])}, got {tuple(shape_of_Z)}")
    U_perp = orthogonal_complement(U)
    V_perp = orthogonal_complement(V)
    if U_perp.shape[1] == 0 and V_perp.shape[1] == 0:
        raise NoNullSpace("U and V are square orthogonal; the constraint fixes Z")
    rng = np.random.default_rng(seed)
    blocks = [(U_perp, V), (U, V_perp), (U_perp, V_perp)]
    H = np.zeros(shape_of_Z)
    for left, right in blocks:
        if left.shape[1] and right.shape[1]:
            H += left @ rng.standard_normal((left.shape[1], right.shape[1])) @ right.T
    return _unit(H)


def check_lemma1(M, U, V):
    """Whether ``||M||_* == ||U M V^T||_*`` to 1e-8 relative precision."""
    M = as_matrix(M, "M")
    U = require_semi_orthogonal(U, "U")
    V = require_semi_orthogonal(V, "V")
    if U.shape[1] != M.shape[0] or V.shape[1] != M.shape[1]:
        raise DimensionMismatch(f"cannot form U M V^T from U {U.shape}, M {M.shape}, V {V.shape}")
    lhs = nuclear_norm(M)
    rhs = nuclear_norm(U @ M @ V.T)
    return abs(lhs - rhs) <= LEMMA1_RTOL * max(lhs, 1.0)


def check_lemma2(B, C, D, F):
    """Compare ``||[[B, C], [D, F]]||_*`` against ``||B||_*``.

    Returns
    -------
    holds : bool
        The block norm is at least ``||B||_*`` up to 1e-10.
    margin : float
        ``||[[B, C], [D, F]]||_* - ||B||_*``.
    """
    B, C, D, F = (as_matrix(M, name) for M, name in zip((B, C, D, F), "BCDF"))
    if B.shape[0] != C.shape[0] or D.shape[0] != F.shape[0] or B.shape[1] != D.shape[1] or C.shape[1] != F.shape[1]:
        raise DimensionMismatch(
            f"blocks do not tile: B {B.shape}, C {C.shape}, D {D.shape}, F {F.shape}"
        )
    margin = nuclear_norm(np.block([[B, C], [D, F]])) - nuclear_norm(B)
    return margin >= -EQUALITY_TOL, margin
