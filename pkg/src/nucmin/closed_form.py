"""Closed-form minimizers of the nuclear norm under linear equality constraints.

Problems solved here:

* ``min ||Z||_*  s.t.  X = A Z``          -- :func:`solve_lrr`
* the same with full-row-rank ``A``        -- :func:`solve_lrr_full_row_rank`
* ``min ||Z||_*  s.t.  X = X Z``          -- :func:`shape_interaction_matrix`
* ``min ||Z||_*  s.t.  U^T Z V = M``      -- :func:`solve_semiorthogonal`
* ``min ||Z||_*  s.t.  X = A Z B``        -- :func:`solve_azb`

Each returns a :class:`Solution`. Every minimizer is unique, so the solvers
are deterministic functions of their inputs.
"""

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, Infeasible, NotFullRowRank, ZeroDictionary
from .linalg import (
    DEFAULT_TOLERANCES,
    as_matrix,
    frobenius,
    nuclear_norm,
    numerical_rank,
    require_semi_orthogonal,
    skinny_svd,
    span_residual,
)


class MethodTag(str, enum.Enum):
    THEOREM1 = "theorem1"
    COROLLARY1 = "corollary1"
    COROLLARY2 = "corollary2"
    LEMMA3 = "lemma3"
    AZB = "azb"


@dataclass(frozen=True, eq=False)
class Solution:
    """Minimizer together with its objective and constraint residual.

    ``feasibility_residual`` is the Frobenius norm of the constraint violation
    divided by ``1 + ||rhs||_F``.
    """

    minimizer: np.ndarray
    objective: float
    feasibility_residual: float
    method_tag: MethodTag
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Partition:
    """Row blocks of ``V`` from the skinny SVD ``[X, A] = U diag(sigma) V^T``."""

    U: np.ndarray
    sigma: np.ndarray
    V_X: np.ndarray
    V_A: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]


def _finish(Z, residual, tag, tol, **diagnostics):
    if residual > tol.feas_tol:
        raise Infeasible(
            f"closed-form minimizer violates the constraint: residual {residual:.3e} > {tol.feas_tol:.3e}"
        )
    Z.setflags(write=False)
    return Solution(Z, nuclear_norm(Z), residual, tag, diagnostics)


def _check_rows(X, A, left="X", right="A"):
    if X.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"{left} has {X.shape[0]} rows but {right} has {A.shape[0]}")


def partition_v(X, A, tol=DEFAULT_TOLERANCES, rank=None):
    """Split the right singular vectors of ``[X, A]`` into X and A row blocks.

    Parameters
    ----------
    X, A : array_like
        Matrices with the same number of rows.
    tol : Tolerances
    rank : int, optional
        Keep only the leading `rank` singular triplets. :func:`solve_lrr`
        passes ``rank(A)`` here: for feasible ``X`` the two ranks agree, and
        fixing it stops a rounding-level singular value of ``[X, A]`` from
        entering ``V_A``.
    """
    X = as_matrix(X, "X")
    A = as_matrix(A, "A")
    _check_rows(X, A)
    svd = skinny_svd(np.hstack([X, A]), tol)
    r = svd.rank if rank is None else min(rank, svd.rank)
    nx = X.shape[1]
    V = svd.V[:, :r]
    return Partition(svd.U[:, :r], svd.sigma[:r], V[:nx], V[nx:])


def lrr_residual(Z, X, A):
    return frobenius(A @ Z - X) / (1.0 + frobenius(X))


def solve_lrr(X, A, tol=DEFAULT_TOLERANCES):
    """Unique minimizer of ``||Z||_*`` subject to ``X = A Z``.

    Computes ``Z* = V_A (V_A^T V_A)^{-1} V_X^T`` without forming the inverse:
    with the skinny SVD ``V_A^T = U1 S1 V1^T``, ``Z* = V1 S1^{-1} U1^T V_X^T``.

    Parameters
    ----------
    X : array_like, shape (m, n)
    A : array_like, shape (m, k)
        Nonzero dictionary whose column space contains every column of `X`.
    tol : Tolerances

    Returns
    -------
    Solution
        ``minimizer`` has shape (k, n).

    Raises
    ------
    DimensionMismatch
        If `X` and `A` have different row counts.
    ZeroDictionary
        If `A` is numerically zero.
    Infeasible
        If ``X`` is not in ``span(A)`` within ``tol.feas_tol``.
    """
    X = as_matrix(X, "X")
    A = as_matrix(A, "A")
    _check_rows(X, A)
    rank_A = numerical_rank(A, tol)
    if rank_A == 0:
        raise ZeroDictionary("dictionary A is numerically zero")
    gap = span_residual(X, A, tol)
    if gap > tol.feas_tol:
        raise Infeasible(f"X is not in span(A): residual {gap:.3e} > {tol.feas_tol:.3e}")

    if not np.any(X):
        Z = np.zeros((A.shape[1], X.shape[1]))
    else:
        part = partition_v(X, A, tol, rank=rank_A)
        inner = skinny_svd(part.V_A.T, tol)
        Z = (inner.V / inner.sigma) @ (inner.U.T @ part.V_X.T)
    return _finish(Z, lrr_residual(Z, X, A), MethodTag.THEOREM1, tol, rank_A=rank_A)


def solve_lrr_full_row_rank(X, A, tol=DEFAULT_TOLERANCES):
    """Minimizer ``A^T (A A^T)^{-1} X`` for a dictionary of full row rank."""
    X = as_matrix(X, "X")
    A = as_matrix(A, "A")
    _check_rows(X, A)
    rank_A = numerical_rank(A, tol)
    if rank_A != A.shape[0]:
        raise NotFullRowRank(f"A has rank {rank_A} but {A.shape[0]} rows")
    Z = A.T @ scipy.linalg.solve(A @ A.T, X, assume_a="pos")
    return _finish(Z, lrr_residual(Z, X, A), MethodTag.COROLLARY1, tol, rank_A=rank_A)


def shape_interaction_matrix(X, tol=DEFAULT_TOLERANCES):
    """Shape Interaction Matrix ``V_X V_X^T``, the minimizer for ``X = X Z``.

    The result is the orthogonal projector onto the row space of `X`.

    Raises
    ------
    ZeroDictionary
        If `X` is numerically zero.
    """
    X = as_matrix(X, "X")
    svd = skinny_svd(X, tol)
    if svd.rank == 0:
        raise ZeroDictionary("X is numerically zero")
    Z = svd.V @ svd.V.T
    return _finish(Z, lrr_residual(Z, X, X), MethodTag.COROLLARY2, tol, rank_X=svd.rank)


def solve_semiorthogonal(U, V, M, tol=DEFAULT_TOLERANCES):
    """Minimizer ``U M V^T`` of ``||Z||_*`` subject to ``U^T Z V = M``.

    `U` and `V` need orthonormal columns; they need not be square.
    """
    U = require_semi_orthogonal(U, "U")
    V = require_semi_orthogonal(V, "V")
    M = as_matrix(M, "M")
    if U.shape[1] != M.shape[0] or V.shape[1] != M.shape[1]:
        raise DimensionMismatch(
            f"U^T Z V = M needs cols(U) = rows(M) and cols(V) = cols(M); "
            f"got U {U.shape}, V {V.shape}, M {M.shape}"
        )
    Z = U @ M @ V.T
    residual = frobenius(U.T @ Z @ V - M) / (1.0 + frobenius(M))
    return _finish(Z, residual, MethodTag.LEMMA3, tol)


def azb_residual(Z, X, A, B):
    return frobenius(A @ Z @ B - X) / (1.0 + frobenius(X))


def solve_azb(X, A, B, tol=DEFAULT_TOLERANCES):
    """Unique minimizer of ``||Z||_*`` subject to ``X = A Z B``.

    With skinny SVDs ``A = Ua Sa Va^T`` and ``B = Ub Sb Vb^T``, a feasible
    constraint is equivalent to ``Va^T Z Ub = Sa^{-1} Ua^T X Vb Sb^{-1}``,
    which :func:`solve_semiorthogonal` solves. The result equals
    ``pinv(A) X pinv(B)``.

    Raises
    ------
    DimensionMismatch
        Unless ``rows(X) == rows(A)`` and ``cols(X) == cols(B)``.
    ZeroDictionary
        If `A` or `B` is numerically zero.
    Infeasible
        If ``||X - A A^+ X B^+ B||_F > feas_tol (1 + ||X||_F)``.
    """
    X = as_matrix(X, "X")
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    _check_rows(X, A)
    if X.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"X has {X.shape[1]} columns but B has {B.shape[1]}")
    svd_a = skinny_svd(A, tol)
    svd_b = skinny_svd(B, tol)
    if svd_a.rank == 0:
        raise ZeroDictionary("dictionary A is numerically zero")
    if svd_b.rank == 0:
        raise ZeroDictionary("dictionary B is numerically zero")

    core = svd_a.U.T @ X @ svd_b.V
    projected = svd_a.U @ core @ svd_b.V.T
    gap = frobenius(X - projected) / (1.0 + frobenius(X))
    if gap > tol.feas_tol:
        raise Infeasible(f"X = A Z B has no solution: residual {gap:.3e} > {tol.feas_tol:.3e}")

    M = core / svd_a.sigma[:, None] / svd_b.sigma[None, :]
    Z = np.array(solve_semiorthogonal(svd_a.V, svd_b.U, M, tol).minimizer)
    return _finish(
        Z, azb_residual(Z, X, A, B), MethodTag.AZB, tol, rank_A=svd_a.rank, rank_B=svd_b.rank
    )
