"""Dense kernels for the projected problem: Cholesky, triangular solves, and
a cyclic Jacobi eigensolver.

These run at the Krylov dimension (tens to a few hundred), so simplicity and
exactness of the error taxonomy beat asymptotics. The Jacobi sweep is the one
hot loop and is numba-compiled.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import InvalidParameter, MaxIterations, NotSPD, SingularFactor

JACOBI_MAX_SWEEPS = 30
JACOBI_THRESHOLD = 1e-14  # times the initial off-diagonal Frobenius norm


def _require_symmetric(S: np.ndarray, what: str) -> np.ndarray:
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidParameter(f"{what} must be a square 2-D array")
    scale = np.abs(S).max(initial=0.0)
    if not np.all(np.isfinite(S)):
        raise InvalidParameter(f"{what} must have finite entries")
    if np.abs(S - S.T).max(initial=0.0) > 1e-12 * max(scale, 1.0):
        raise InvalidParameter(f"{what} is not symmetric")
    return S


def cholesky(S: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^T = S; strictly positive diagonal.

    Raises NotSPD on a non-positive pivot, the projected-pencil signal that
    positive definiteness was lost. Tridiagonal input (the solver's hot
    case) takes a bidiagonal fast path.
    """
    S = _require_symmetric(S, "cholesky input")
    n = S.shape[0]
    if n > 2 and not np.triu(S, 2).any():
        return _cholesky_tridiagonal(S)
    L = np.zeros_like(S)
    for j in range(n):
        d = S[j, j] - L[j, :j] @ L[j, :j]
        if d <= 0.0 or not np.isfinite(d):
            raise NotSPD(f"non-positive pivot {d:g} at column {j}")
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (S[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def _cholesky_tridiagonal(S: np.ndarray) -> np.ndarray:
    """Bidiagonal factor of a tridiagonal matrix; same contract as cholesky."""
    n = S.shape[0]
    diag = np.diag(S).copy()
    sub = np.diag(S, -1)
    ldiag = np.empty(n)
    lsub = np.empty(n - 1)
    d = diag[0]
    for j in range(n):
        if d <= 0.0 or not np.isfinite(d):
            raise NotSPD(f"non-positive pivot {d:g} at column {j}")
        ldiag[j] = math.sqrt(d)
        if j + 1 < n:
            lsub[j] = sub[j] / ldiag[j]
            d = diag[j + 1] - lsub[j] * lsub[j]
    L = np.diag(ldiag)
    idx = np.arange(n - 1)
    L[idx + 1, idx] = lsub
    return L


def solve_lower_triangular(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution L x = b."""
    L = np.asarray(L, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = L.shape[0]
    x = np.zeros(n)
    for i in range(n):
        if L[i, i] == 0.0:
            raise SingularFactor(f"zero diagonal at row {i}")
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_upper_triangular(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution U x = b."""
    U = np.asarray(U, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = U.shape[0]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        if U[i, i] == 0.0:
            raise SingularFactor(f"zero diagonal at row {i}")
        x[i] = (b[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


@njit(cache=True)
def _jacobi_sweeps(A, V, thresh, max_sweeps):  # pragma: no cover - jitted
    n = A.shape[0]
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= thresh:
                    continue
                rotated = True
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    aip = A[i, p]
                    aiq = A[i, q]
                    A[i, p] = c * aip - s * aiq
                    A[i, q] = s * aip + c * aiq
                for i in range(n):
                    api = A[p, i]
                    aqi = A[q, i]
                    A[p, i] = c * api - s * aqi
                    A[q, i] = s * api + c * aqi
                for i in range(n):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = c * vip - s * viq
                    V[i, q] = s * vip + c * viq
        if not rotated:
            return sweep
    return -1


def jacobi_eigh(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (eigenvalues ascending, orthogonal eigenvector matrix) with the
    columns of Q matching the eigenvalue order. Rotations below
    JACOBI_THRESHOLD times the initial off-diagonal norm are skipped; more
    than JACOBI_MAX_SWEEPS sweeps raises MaxIterations.
    """
    S = _require_symmetric(S, "jacobi_eigh input")
    n = S.shape[0]
    A = S.copy()
    V = np.eye(n)
    off0 = np.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
    if off0 > 0.0:
        sweeps = _jacobi_sweeps(A, V, JACOBI_THRESHOLD * off0, JACOBI_MAX_SWEEPS)
        if sweeps < 0:
            raise MaxIterations(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]
