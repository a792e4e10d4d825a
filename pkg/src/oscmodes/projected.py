"""Exact solution of the projected paired eigenproblem and Ritz assembly.

The order-m pencil (K_tilde, T_tilde) is reduced to an ordinary symmetric
problem through a Cholesky factor of T_tilde: with T = L L^T the equation
T K u = w^2 u becomes (L^T K L) z = w^2 z, u = L z. Only the positive
frequency branch is materialized; (u, -v) with -w is implied by pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import smalldense
from .errors import DimensionMismatch, NotSPD
from .recursion import BiorthBasis


@dataclass(frozen=True)
class ProjectedPencil:
    """Symmetric (tridiagonal, in the solver's use) matrices of one order."""

    k_tilde: np.ndarray
    t_tilde: np.ndarray

    @property
    def order(self) -> int:
        return self.k_tilde.shape[0]


@dataclass(frozen=True)
class RitzPair:
    """Approximate mode: frequency, projected coefficients, and (once
    assembled) the full-space vectors with their relative residuals."""

    omega: float
    u: np.ndarray
    v: np.ndarray
    xi: np.ndarray | None = None
    eta: np.ndarray | None = None
    rho_k: float | None = None
    rho_t: float | None = None


def _reduce_and_solve(primary: np.ndarray, factored: np.ndarray):
    """Solve factored K primary-side: F = L L^T, C = L^T P L, eigh(C)."""
    L = smalldense.cholesky(factored)
    C = L.T @ primary @ L
    C = 0.5 * (C + C.T)
    w2, Z = smalldense.jacobi_eigh(C)
    return w2, L @ Z


def solve_projected(pencil: ProjectedPencil) -> list[RitzPair]:
    """All positive-branch solutions of the projected pencil, ascending.

    Reduction goes through T_tilde's Cholesky factor; if that factorization
    fails but K_tilde's succeeds, the roles are swapped (the problem is
    symmetric under K <-> T with u <-> v) before NotSPD is raised. Any
    non-positive squared frequency signals a corrupted basis and raises
    NotSPD as well.
    """
    k_tilde = pencil.k_tilde
    t_tilde = pencil.t_tilde
    swapped = False
    try:
        w2, U = _reduce_and_solve(k_tilde, t_tilde)
    except NotSPD:
        w2, U = _reduce_and_solve(t_tilde, k_tilde)
        swapped = True

    if w2[0] <= 0.0:
        raise NotSPD(f"projected pencil yielded omega^2 = {w2[0]:g}")
    omegas = np.sqrt(w2)

    if swapped:
        V = U
        U = (t_tilde @ V) / omegas
    else:
        V = (k_tilde @ U) / omegas
    uv = np.einsum("ij,ij->j", U, V)
    if np.any(uv <= 0.0):
        raise NotSPD("a projected pair lost (u, v) positivity")
    scale = np.sqrt(uv)
    U = U / scale
    V = V / scale
    return [RitzPair(omega=float(omegas[k]), u=U[:, k], v=V[:, k])
            for k in range(pencil.order)]


def assemble_ritz(basis: BiorthBasis, u: np.ndarray, v: np.ndarray,
                  omega: float) -> RitzPair:
    """Lift projected coefficients to full-space vectors through the basis.

    The coefficient length m may be basis.n or basis.n - 1 (the projected
    matrices only cover completed steps); the first m pairs are used.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    m = u.shape[0]
    if v.shape[0] != m or m > basis.n or m < 1:
        raise DimensionMismatch(
            f"coefficients of length {m} against a basis of {basis.n} pairs")
    xi = basis.xi_vectors[:m].T @ u
    eta = basis.eta_vectors[:m].T @ v
    return RitzPair(omega=float(omega), u=u, v=v, xi=xi, eta=eta)


def residual_norms(Kop, Top, pair: RitzPair) -> tuple[float, float]:
    """Relative residuals of K xi = omega eta and T eta = omega xi.

    Both are normalized into [0, 1] by the triangle-inequality denominator
    ||K xi|| + omega ||eta|| (and its T analogue).
    """
    if pair.xi is None or pair.eta is None:
        raise DimensionMismatch("pair must be assembled before measuring residuals")
    k_xi = Kop.apply(pair.xi)
    t_eta = Top.apply(pair.eta)
    omega = pair.omega
    rho_k = (np.linalg.norm(k_xi - omega * pair.eta)
             / (np.linalg.norm(k_xi) + omega * np.linalg.norm(pair.eta)))
    rho_t = (np.linalg.norm(t_eta - omega * pair.xi)
             / (np.linalg.norm(t_eta) + omega * np.linalg.norm(pair.xi)))
    return float(rho_k), float(rho_t)


def with_residuals(Kop, Top, pair: RitzPair) -> RitzPair:
    rho_k, rho_t = residual_norms(Kop, Top, pair)
    return replace(pair, rho_k=rho_k, rho_t=rho_t)


def pairing_residual(pencil: ProjectedPencil, pair: RitzPair) -> float:
    """Worst projected-equation residual over the pair and its -omega
    companion (u, -v), relative to ||K_tilde|| + ||T_tilde||.

    The companion residual equals the primary one algebraically; evaluating
    both keeps the +/-omega pairing an explicit, checked property.
    """
    scale = (np.linalg.norm(pencil.k_tilde, ord=np.inf)
             + np.linalg.norm(pencil.t_tilde, ord=np.inf))
    worst = 0.0
    for omega, u, v in ((pair.omega, pair.u, pair.v),
                        (-pair.omega, pair.u, -pair.v)):
        worst = max(worst,
                    np.linalg.norm(pencil.k_tilde @ u - omega * v),
                    np.linalg.norm(pencil.t_tilde @ v - omega * u))
    return float(worst / scale) if scale > 0 else float(worst)
