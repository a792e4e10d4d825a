"""Sparse symmetric storage and the operator layer the solver iterates with.

Both the spring-constant matrix K and the inverse-mass operator T enter the
recursion only through ``apply``; T can be an explicit sparse matrix or the
action of M^-1 realized by an inner conjugate-gradient solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, InvalidParameter, MaxIterations, NotSPD


@dataclass(frozen=True)
class SparseSymMatrix:
    """Symmetric sparse N x N matrix stored row-compressed with both triangles.

    Storing both triangles keeps the matvec a plain row-major CSR product,
    which is the only kernel touched at large N. Instances are immutable and
    safe to share across threads. Build through ``from_coo`` / ``from_dense``
    to have the symmetry, finiteness and no-duplicate invariants checked;
    the direct constructor trusts its input (used for arithmetic on already
    validated matrices).
    """

    csr: sp.csr_matrix = field(repr=False)

    def __post_init__(self):
        if self.csr.shape[0] != self.csr.shape[1]:
            raise InvalidParameter(f"matrix must be square, got {self.csr.shape}")

    @property
    def dim(self) -> int:
        return self.csr.shape[0]

    @property
    def nnz(self) -> int:
        return self.csr.nnz

    @classmethod
    def from_coo(cls, dim: int, rows, cols, values) -> "SparseSymMatrix":
        """Build from triplets covering *both* triangles; validates the
        symmetry, finiteness, index-range and no-duplicate invariants."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if not (rows.shape == cols.shape == values.shape):
            raise InvalidParameter("triplet arrays must have equal length")
        if rows.size and (rows.min() < 0 or cols.min() < 0
                          or rows.max() >= dim or cols.max() >= dim):
            raise InvalidParameter("index out of range")
        if not np.all(np.isfinite(values)):
            raise InvalidParameter("matrix values must be finite")

        codes = rows * dim + cols
        order = np.argsort(codes, kind="stable")
        if codes.size and np.any(np.diff(codes[order]) == 0):
            raise InvalidParameter("duplicate (i, j) entries are forbidden")

        # (i, j, v) present iff (j, i, v) present: the transposed triplet set,
        # sorted the same way, must match exactly.
        codes_t = cols * dim + rows
        order_t = np.argsort(codes_t, kind="stable")
        if (not np.array_equal(codes[order], codes_t[order_t])
                or not np.array_equal(values[order], values[order_t])):
            raise InvalidParameter("entries are not symmetric")

        csr = sp.csr_matrix((values, (rows, cols)), shape=(dim, dim))
        csr.sort_indices()
        return cls(csr)

    @classmethod
    def from_dense(cls, dense) -> "SparseSymMatrix":
        dense = np.asarray(dense, dtype=np.float64)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise InvalidParameter("expected a square 2-D array")
        if not np.array_equal(dense, dense.T):
            raise InvalidParameter("entries are not symmetric")
        if not np.all(np.isfinite(dense)):
            raise InvalidParameter("matrix values must be finite")
        csr = sp.csr_matrix(dense)
        csr.sort_indices()
        return cls(csr)

    @classmethod
    def identity(cls, dim: int) -> "SparseSymMatrix":
        return cls(sp.identity(dim, dtype=np.float64, format="csr"))

    @classmethod
    def diagonal(cls, values) -> "SparseSymMatrix":
        values = np.asarray(values, dtype=np.float64)
        return cls(sp.diags(values, format="csr"))

    def toarray(self) -> np.ndarray:
        return self.csr.toarray()

    def tocoo(self):
        """Triplets (rows, cols, values) in row-major order, both triangles."""
        coo = self.csr.tocoo()
        return coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data.copy()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """y_i = sum_j A_ij x_j, exactly as stored; deterministic."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise DimensionMismatch(
                f"vector of length {x.shape} against matrix of dim {self.dim}")
        return self.csr @ x


def cg_solve(A: SparseSymMatrix, b: np.ndarray, tol: float = 1e-12,
             max_iter: int | None = None) -> tuple[np.ndarray, int]:
    """Conjugate gradients for SPD ``A``; returns (x, iterations).

    Terminates when ||Ax - b|| <= tol * ||b||. Raises NotSPD when a search
    direction has non-positive curvature, MaxIterations when the budget runs
    out before the residual target.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (A.dim,):
        raise DimensionMismatch(f"rhs of length {b.shape} against dim {A.dim}")
    if max_iter is None:
        max_iter = 10 * A.dim

    target = tol * np.linalg.norm(b)
    x = np.zeros_like(b)
    r = b.copy()
    rr = r @ r
    if np.sqrt(rr) <= target:
        return x, 0
    p = r.copy()
    for it in range(1, max_iter + 1):
        Ap = A.matvec(p)
        pAp = p @ Ap
        if pAp <= 0.0:
            raise NotSPD("non-positive curvature encountered in CG")
        step = rr / pAp
        x += step * p
        r -= step * Ap
        rr_new = r @ r
        if np.sqrt(rr_new) <= target:
            # recompute the true residual; the recurrence can drift
            true = np.linalg.norm(b - A.matvec(x))
            if true <= target:
                return x, it
            rr_new = None
        if rr_new is None:
            r = b - A.matvec(x)
            rr_new = r @ r
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise MaxIterations(f"CG did not reach tol={tol:g} in {max_iter} iterations")


class ExplicitOperator:
    """Apply an explicitly stored sparse symmetric matrix."""

    def __init__(self, matrix: SparseSymMatrix):
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix.matvec(x)


class InverseMassOperator:
    """Apply T = M^-1 through an inner CG solve, never forming the inverse.

    The inner tolerance defaults far below the outer residual target because
    biorthogonality of the recursion degrades with inexact applies.
    """

    def __init__(self, mass: SparseSymMatrix, inner_tol: float = 1e-12,
                 inner_max_iter: int | None = None):
        if not 0 < inner_tol < 1:
            raise InvalidParameter("inner_tol must be in (0, 1)")
        self.mass = mass
        self.inner_tol = inner_tol
        self.inner_max_iter = (10 * mass.dim if inner_max_iter is None
                               else inner_max_iter)

    @property
    def dim(self) -> int:
        return self.mass.dim

    def apply(self, x: np.ndarray) -> np.ndarray:
        y, _ = cg_solve(self.mass, x, tol=self.inner_tol,
                        max_iter=self.inner_max_iter)
        return y
