"""Dense linear-algebra primitives.

Matrices are plain two-dimensional ``float64`` numpy arrays. Every public
function validates its inputs with :func:`as_matrix`, so NaN or Inf raise
:class:`~nucmin.errors.NonFiniteInput` before any factorization runs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonFiniteInput, NotSemiOrthogonal

#: Tolerance for ``Q^T Q = I`` checks on factors that must have orthonormal columns.
SEMI_ORTHOGONAL_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    """Numeric policy shared by the solvers.

    Parameters
    ----------
    rank_tol_factor : float
        Singular values at or below ``rank_tol_factor * max(m, n) * sigma_max``
        are treated as zero.
    feas_tol : float
        Relative threshold for constraint residuals, normalised by
        ``1 + ||X||_F``.
    verify_tol : float
        Threshold used by verification checks.
    """

    rank_tol_factor: float = float(np.finfo(np.float64).eps)
    feas_tol: float = 1e-8
    verify_tol: float = 1e-6

    def __post_init__(self):
        for name in ("rank_tol_factor", "feas_tol", "verify_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite nonnegative number, got {value!r}")

    def rank_cutoff(self, shape, sigma_max):
        return self.rank_tol_factor * max(shape) * sigma_max


DEFAULT_TOLERANCES = Tolerances()


def as_matrix(M, name="matrix"):
    """Return `M` as a finite 2-D float64 array."""
    arr = np.asarray(M, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"{name} contains NaN or Inf entries")
    return arr


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SkinnySVD:
    """Rank-truncated factorization ``M = U @ diag(sigma) @ V.T``.

    ``U`` is m x r and ``V`` is n x r, both with orthonormal columns. A zero
    matrix has ``r == 0`` and zero-column factors.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.T


def _fix_signs(U, V):
    # make the largest-magnitude entry of each U column positive
    if U.shape[1] == 0:
        return U, V
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs


def skinny_svd(M, tol=DEFAULT_TOLERANCES):
    """Skinny SVD keeping singular values above the rank cutoff.

    Parameters
    ----------
    M : array_like, shape (m, n)
    tol : Tolerances

    Returns
    -------
    SkinnySVD
        Factors with a deterministic sign convention: within each singular
        pair the entry of largest magnitude in the left vector is positive.
    """
    M = as_matrix(M)
    m, n = M.shape
    if M.size == 0:
        return SkinnySVD(_frozen(np.zeros((m, 0))), _frozen(np.zeros(0)), _frozen(np.zeros((n, 0))))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    cutoff = tol.rank_cutoff(M.shape, s[0])
    r = int(np.count_nonzero(s > cutoff))
    U, V = _fix_signs(U[:, :r], Vt[:r].T)
    return SkinnySVD(_frozen(U), _frozen(s[:r]), _frozen(V))


def singular_values(M):
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def nuclear_norm(M):
    """Sum of all singular values of `M`, with no rank truncation."""
    return float(np.sum(singular_values(M)))


def numerical_rank(M, tol=DEFAULT_TOLERANCES):
    s = singular_values(M)
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s > tol.rank_cutoff(np.shape(M), s[0])))


def pseudo_inverse(M, tol=DEFAULT_TOLERANCES):
    """Moore-Penrose inverse ``V @ diag(1/sigma) @ U.T`` from the skinny SVD."""
    svd = skinny_svd(M, tol)
    return (svd.V / svd.sigma) @ svd.U.T


def frobenius(M):
    return float(np.linalg.norm(M)) if np.size(M) else 0.0


def relative_distance(Z, reference):
    """``||Z - reference||_F / max(||reference||_F, 1)``.

    The floor of one keeps the measure meaningful when the reference is zero.
    """
    return frobenius(np.asarray(Z) - np.asarray(reference)) / max(frobenius(reference), 1.0)


def span_residual(X, A, tol=DEFAULT_TOLERANCES):
    """Normalised distance ``||X - A A^+ X||_F / (1 + ||X||_F)``."""
    X = as_matrix(X, "X")
    A = as_matrix(A, "A")
    if X.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but A has {A.shape[0]}")
    U = skinny_svd(A, tol).U
    return frobenius(X - U @ (U.T @ X)) / (1.0 + frobenius(X))


def in_span(X, A, tol=DEFAULT_TOLERANCES):
    """Whether every column of `X` lies in the column space of `A`."""
    return span_residual(X, A, tol) <= tol.feas_tol


def semi_orthogonality_error(Q):
    Q = np.asarray(Q, dtype=np.float64)
    k = Q.shape[1]
    return frobenius(Q.T @ Q - np.eye(k))


def require_semi_orthogonal(Q, name="matrix"):
    Q = as_matrix(Q, name)
    err = semi_orthogonality_error(Q)
    if err > SEMI_ORTHOGONAL_TOL * max(1, Q.shape[1]):
        raise NotSemiOrthogonal(f"{name} does not have orthonormal columns (||Q^T Q - I||_F = {err:.3e})")
    return Q


def orthogonal_complement(B, tol=DEFAULT_TOLERANCES):
    """Columns completing `B` to a square orthogonal matrix.

    Uses a full Householder QR of `B`; the trailing columns of ``Q`` span the
    orthogonal complement of ``range(B)``. When `B` is already square the
    result has zero columns.
    """
    B = require_semi_orthogonal(B, "B")
    m, k = B.shape
    if k == m:
        return np.zeros((m, 0))
    if k == 0:
        return np.eye(m)
    Q, _ = scipy.linalg.qr(B, mode="full")
    return Q[:, k:]
