"""Dense complex linear algebra: factorizations, solves, norms.

Square systems go through LU with partial pivoting (the hot path after
patching), tall systems through column-pivoted QR realizing the
least-squares / pseudo-inverse action.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = ["Factorization", "RankDeficientError", "factorize", "solve", "norm2"]

_PIVOT_RTOL = 1e-14


class RankDeficientError(np.linalg.LinAlgError):
    """Raised when solving against a factorization flagged rank deficient."""


@dataclass
class Factorization:
    kind: str  # "lu" or "qr"
    data: tuple
    m: int
    n: int
    rank_deficient: bool


def factorize(A: np.ndarray) -> Factorization:
    """Factor an m x n complex matrix with m >= n for repeated solves.

    Rank deficiency is flagged (not raised) when the smallest pivot
    magnitude falls below 1e-14 times the largest; callers decide how to
    react.
    """
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    m, n = A.shape
    if m < n:
        raise ValueError("factorize requires m >= n")
    if m == n:
        with warnings.catch_warnings():
            # the rank_deficient flag already reports exactly-zero pivots
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
        pivots = np.abs(np.diagonal(lu))
        return Factorization("lu", (lu, piv), m, n, _deficient(pivots))
    q, r, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    pivots = np.abs(np.diagonal(r))
    return Factorization("qr", (q, r, piv), m, n, _deficient(pivots))


def _deficient(pivots: np.ndarray) -> bool:
    top = pivots.max()
    return bool(top == 0.0 or pivots.min() < _PIVOT_RTOL * top)


def solve(f: Factorization, b: np.ndarray) -> np.ndarray:
    """Solve against a factorization; least-squares in the tall case."""
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (f.m,):
        raise ValueError(f"right-hand side must have length {f.m}")
    if f.rank_deficient:
        raise RankDeficientError("factorization is rank deficient")
    if f.kind == "lu":
        return scipy.linalg.lu_solve(f.data, b, check_finite=False)
    q, r, piv = f.data
    y = scipy.linalg.solve_triangular(r, q.conj().T @ b, check_finite=False)
    x = np.empty_like(y)
    x[piv] = y
    return x


def norm2(v: np.ndarray) -> float:
    """Euclidean norm."""
    return float(np.linalg.norm(v))
