"""Seeded random test instances."""

from dataclasses import dataclass

import numpy as np

PROFILES = ("full_row_rank", "full_column_rank", "deficient")


def random_semi_orthogonal(rng, n, k):
    """An n x k matrix with orthonormal columns (k <= n)."""
    if k > n:
        raise ValueError(f"cannot fit {k} orthonormal columns in dimension {n}")
    Q, R = np.linalg.qr(rng.standard_normal((n, k)))
    # sign fix makes Q Haar-distributed
    return Q * np.sign(np.diag(R))


def random_low_rank(rng, m, n, rank):
    """Gaussian product with exact rank ``rank``."""
    if rank == 0:
        return np.zeros((m, n))
    return rng.standard_normal((m, rank)) @ rng.standard_normal((rank, n)) / np.sqrt(rank)


@dataclass(frozen=True, eq=False)
class LrrInstance:
    X: np.ndarray
    A: np.ndarray
    Z0: np.ndarray
    profile: str
    rank: int
    seed: int


def random_lrr_instance(seed, m, k, n, profile="deficient", rank=None):
    """Feasible instance ``X = A Z0`` with ``A`` of shape (m, k).

    ``profile`` controls the rank of ``A``: ``full_row_rank`` needs
    ``k >= m``, ``full_column_rank`` needs ``m >= k``, ``deficient`` picks a
    rank strictly below ``min(m, k)`` unless `rank` is given.
    """
    rng = np.random.default_rng(seed)
    if profile == "full_row_rank":
        if k < m:
            raise ValueError("full_row_rank needs k >= m")
        rank = m
    elif profile == "full_column_rank":
        if m < k:
            raise ValueError("full_column_rank needs m >= k")
        rank = k
    elif profile == "deficient":
        if rank is None:
            top = min(m, k)
            rank = int(rng.integers(1, top)) if top > 1 else 1
    else:
        raise ValueError(f"unknown profile {profile!r}")
    A = random_low_rank(rng, m, k, rank)
    Z0 = rng.standard_normal((k, n))
    return LrrInstance(A @ Z0, A, Z0, profile, rank, seed)


def random_shapes(rng, profile, high=100, low=2):
    """Draw (m, k, n) in ``[low, high]`` compatible with `profile`."""
    m, k, n = (int(v) for v in rng.integers(low, high + 1, size=3))
    if profile == "full_row_rank" and k < m:
        m, k = k, m
    elif profile == "full_column_rank" and m < k:
        m, k = k, m
    return m, k, n
