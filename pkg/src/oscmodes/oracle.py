"""Desk-scale ground truth: dense full-spectrum reference and the random
sparse SPD problem generator.

The dense route mirrors the projected solver's symmetric reduction at full
dimension (factor T, transform K, symmetric eigensolve) but runs on LAPACK
so it is computationally independent of the hand-written kernels it
validates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NotSPD, SizeGuard
from .operators import SparseSymMatrix
from .rng import SplitMix64

DENSE_DIM_LIMIT = 4000
GERSHGORIN_MARGIN = 0.1


@dataclass(frozen=True)
class DenseSpectrum:
    """All N positive frequencies, ascending; optionally the mode pairs as
    rows of (N, N) arrays with (xi_k, eta_k) = 1."""

    omegas: np.ndarray
    xi: np.ndarray | None = None
    eta: np.ndarray | None = None


def dense_spectrum(K: SparseSymMatrix, T: SparseSymMatrix,
                   with_modes: bool = False) -> DenseSpectrum:
    """Full spectrum of the paired problem K xi = w eta, T eta = w xi.

    Densifies T, factors T = G G^T, forms C = G^T K G and diagonalizes it;
    the eigenvalues of C are the squared frequencies. Guarded to N <= 4000.
    """
    if K.dim != T.dim:
        raise InvalidParameter("K and T dimensions differ")
    n = K.dim
    if n > DENSE_DIM_LIMIT:
        raise SizeGuard(f"dense oracle limited to N <= {DENSE_DIM_LIMIT}, got {n}")

    t_dense = T.toarray()
    try:
        G = np.linalg.cholesky(t_dense)
    except np.linalg.LinAlgError as exc:
        raise NotSPD("T is not positive definite") from exc
    k_dense = K.toarray()
    C = G.T @ k_dense @ G
    C = 0.5 * (C + C.T)
    w2, Z = np.linalg.eigh(C)
    if w2[0] <= 0.0:
        raise NotSPD(f"K is not positive definite (omega^2 min = {w2[0]:g})")
    omegas = np.sqrt(w2)

    if not with_modes:
        return DenseSpectrum(omegas=omegas)

    xi = (G @ Z) / np.sqrt(omegas)
    eta = (k_dense @ xi) / omegas
    # (xi_k, eta_k) = 1 holds by construction; rescale to squash rounding
    norm = np.sqrt(np.einsum("ik,ik->k", xi, eta))
    xi /= norm
    eta /= norm
    return DenseSpectrum(omegas=omegas, xi=xi.T, eta=eta.T)


def gen_random_spd(dim: int, avg_nnz_row: int, seed: int) -> SparseSymMatrix:
    """Random sparse symmetric positive definite matrix.

    The off-diagonal pattern places on average ``avg_nnz_row`` entries per
    row at uniformly random positions with values uniform in [-1, 1]; the
    diagonal is shifted to each row's absolute off-diagonal sum plus a fixed
    margin, so every Gershgorin disc sits in the strictly positive half-line.
    Fully deterministic for fixed (dim, avg_nnz_row, seed).
    """
    if dim < 1:
        raise InvalidParameter("dim must be positive")
    if avg_nnz_row < 0 or avg_nnz_row >= dim:
        raise InvalidParameter("avg_nnz_row must satisfy 0 <= avg_nnz_row < dim")

    stream = SplitMix64(seed)
    n_pairs = (dim * avg_nnz_row) // 2
    if n_pairs:
        i = stream.integers(n_pairs, dim)
        j = stream.integers(n_pairs, dim)
        keep = i != j
        lo = np.minimum(i[keep], j[keep])
        hi = np.maximum(i[keep], j[keep])
        codes = np.unique(lo * np.int64(dim) + hi)
        lo = codes // dim
        hi = codes % dim
        vals = stream.uniform(codes.shape[0])
    else:
        lo = hi = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)

    diag = np.full(dim, GERSHGORIN_MARGIN)
    np.add.at(diag, lo, np.abs(vals))
    np.add.at(diag, hi, np.abs(vals))

    all_i = np.concatenate([lo, hi, np.arange(dim, dtype=np.int64)])
    all_j = np.concatenate([hi, lo, np.arange(dim, dtype=np.int64)])
    all_v = np.concatenate([vals, vals, diag])
    return SparseSymMatrix.from_coo(dim, all_i, all_j, all_v)


def generate_problem(dim: int, avg_nnz_row: int, seed: int
                     ) -> tuple[SparseSymMatrix, SparseSymMatrix]:
    """A (K, T) pair with independent patterns derived from one seed."""
    stream = SplitMix64(seed)
    seed_k = stream.next_u64()
    seed_t = stream.next_u64()
    return (gen_random_spd(dim, avg_nnz_row, seed_k),
            gen_random_spd(dim, avg_nnz_row, seed_t))
