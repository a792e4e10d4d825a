"""Two-sided Lanczos recursion building a biorthogonal pair of Krylov bases.

One step applies T to the last eta vector and K to the last xi vector,
orthogonalizes the residuals against the stored pairs, and normalizes the new
pair so (xi, eta) = 1. The recursion coefficients assemble the projected
tridiagonal matrices as a byproduct: alpha/beta belong to the eta-side
projection of T, gamma/delta to the xi-side projection of K.

Bookkeeping: a basis holding n pairs has completed m steps, with m = n - 1
normally and m = n after a lucky breakdown closed an invariant subspace.
Step i consumes pair i and produces the coefficients alpha_i, gamma_i (and,
when it extends, pair i+1 with beta_{i+1}, delta_{i+1}); the order-m
projected matrices therefore use the first m pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegeneratePair, InvalidParameter

DEGENERATE_TOL = 1e-14
BREAKDOWN_TOL = 1e-13
DEFAULT_BIORTH_TOL = 1e-10


class StepStatus(Enum):
    EXTENDED = "extended"
    LUCKY_BREAKDOWN = "lucky_breakdown"
    SERIOUS_BREAKDOWN = "serious_breakdown"


@dataclass
class StepOutcome:
    """Result of one recursion step.

    A lucky breakdown carries no new pair (the basis closed an invariant
    subspace); a serious breakdown additionally leaves the basis untouched
    and reports the residual diagnostics (r_norm, s_norm, rs).
    """

    status: StepStatus
    alpha: float | None = None
    gamma: float | None = None
    beta_next: float | None = None
    delta_next: float | None = None
    new_xi: np.ndarray | None = None
    new_eta: np.ndarray | None = None
    r_norm: float | None = None
    s_norm: float | None = None
    rs: float | None = None


class BiorthBasis:
    """Growing pair of vector families with (xi_i, eta_j) = delta_ij.

    Single-owner mutable state: one solve drives one basis. The deflation
    set holds converged (xi_c, eta_c) pairs that every residual is projected
    against so restarted searches cannot re-enter converged directions.
    """

    def __init__(self, dim: int, deflation=None,
                 biorth_tol: float = DEFAULT_BIORTH_TOL, capacity: int = 8):
        self.dim = dim
        self.biorth_tol = biorth_tol
        self.n = 0
        self._xi = np.zeros((max(capacity, 2), dim))
        self._eta = np.zeros_like(self._xi)
        self.alpha: list[float] = []
        self.beta: list[float] = []   # beta[j] is the coefficient of step j+1
        self.gamma: list[float] = []
        self.delta: list[float] = []
        self.complete = False  # set by a lucky breakdown
        self.biorth_error = 0.0
        if deflation is None:
            self._defl_xi = np.zeros((0, dim))
            self._defl_eta = np.zeros((0, dim))
        else:
            xi_c, eta_c = deflation
            self._defl_xi = np.atleast_2d(np.asarray(xi_c, dtype=np.float64))
            self._defl_eta = np.atleast_2d(np.asarray(eta_c, dtype=np.float64))

    @property
    def steps(self) -> int:
        """Completed steps; order of the assembled projected matrices."""
        return len(self.alpha)

    @property
    def xi_vectors(self) -> np.ndarray:
        """(n, N) view; row i is xi_{i+1}."""
        return self._xi[:self.n]

    @property
    def eta_vectors(self) -> np.ndarray:
        return self._eta[:self.n]

    @property
    def deflation_size(self) -> int:
        return self._defl_xi.shape[0]

    def _grow(self):
        if self.n == self._xi.shape[0]:
            self._xi = np.vstack([self._xi, np.zeros_like(self._xi)])
            self._eta = np.vstack([self._eta, np.zeros_like(self._eta)])

    def append_pair(self, xi: np.ndarray, eta: np.ndarray):
        self._grow()
        err = abs(float(xi @ eta) - 1.0)
        if self.n:
            err = max(err,
                      np.abs(self.eta_vectors @ xi).max(),
                      np.abs(self.xi_vectors @ eta).max())
        if self.deflation_size:
            err = max(err,
                      np.abs(self._defl_eta @ xi).max(),
                      np.abs(self._defl_xi @ eta).max())
        self.biorth_error = max(self.biorth_error, err)
        self._xi[self.n] = xi
        self._eta[self.n] = eta
        self.n += 1

    def project_deflated(self, xi: np.ndarray, eta: np.ndarray):
        """One oblique-projection pass of (xi, eta) against the deflation set."""
        for c in range(self.deflation_size):
            xi = xi - (self._defl_eta[c] @ xi) * self._defl_xi[c]
            eta = eta - (self._defl_xi[c] @ eta) * self._defl_eta[c]
        return xi, eta


def init_pair(xi0: np.ndarray, eta0: np.ndarray, deflation=None,
              biorth_tol: float = DEFAULT_BIORTH_TOL,
              capacity: int = 8) -> BiorthBasis:
    """Start a basis from an arbitrary pair, rescaled so (xi1, eta1) = 1.

    The normalization splits the inner product so that ||xi1|| = ||eta1||,
    which keeps the two families on a common scale regardless of how the
    inputs were scaled. Raises DegeneratePair when the (deflated) inner
    product is numerically zero; the caller resamples.
    """
    xi0 = np.asarray(xi0, dtype=np.float64)
    eta0 = np.asarray(eta0, dtype=np.float64)
    if xi0.shape != eta0.shape or xi0.ndim != 1:
        raise InvalidParameter("starting pair must be two vectors of equal length")
    basis = BiorthBasis(xi0.shape[0], deflation=deflation,
                        biorth_tol=biorth_tol, capacity=capacity)
    if basis.deflation_size:
        for _ in range(2):
            xi0, eta0 = basis.project_deflated(xi0, eta0)

    nx = np.linalg.norm(xi0)
    ny = np.linalg.norm(eta0)
    q = float(xi0 @ eta0)
    if abs(q) <= DEGENERATE_TOL * nx * ny or nx == 0.0 or ny == 0.0:
        raise DegeneratePair(
            f"(xi0, eta0) = {q:g} is degenerate relative to |xi0||eta0| = {nx * ny:g}")
    # a * b = q with |a|/|b| = ||xi0||/||eta0||; sign carried by a
    a = math.copysign(math.sqrt(abs(q) * nx / ny), q)
    b = math.sqrt(abs(q) * ny / nx)
    basis.append_pair(xi0 / a, eta0 / b)
    return basis


def step(Kop, Top, basis: BiorthBasis, full_rebiorth: bool = True) -> StepOutcome:
    """Advance the recursion by one step, mutating ``basis`` unless it breaks
    down seriously.

    With ``full_rebiorth`` the residuals are re-orthogonalized against every
    stored pair by two passes of modified Gram-Schmidt; the deflation set is
    always projected out regardless of the flag, since converged directions
    must stay excluded even when rebiorthogonalization is off.
    """
    if basis.n < 1:
        raise InvalidParameter("basis is empty")
    if basis.complete:
        raise InvalidParameter("basis closed an invariant subspace; restart instead")
    i = basis.steps + 1  # 1-based step index; consumes pair i == basis.n

    xi_i = basis.xi_vectors[i - 1]
    eta_i = basis.eta_vectors[i - 1]
    t_eta = Top.apply(eta_i)
    k_xi = Kop.apply(xi_i)

    alpha_i = float(eta_i @ t_eta)
    gamma_i = float(xi_i @ k_xi)
    r = t_eta - alpha_i * xi_i
    s = k_xi - gamma_i * eta_i
    if i > 1:
        r -= basis.beta[-1] * basis.xi_vectors[i - 2]
        s -= basis.delta[-1] * basis.eta_vectors[i - 2]

    X = basis.xi_vectors
    Y = basis.eta_vectors
    for _ in range(2):
        if full_rebiorth:
            for j in range(basis.n):
                r -= (Y[j] @ r) * X[j]
                s -= (X[j] @ s) * Y[j]
        r, s = basis.project_deflated(r, s)

    r_scale = np.linalg.norm(t_eta) + abs(alpha_i) * np.linalg.norm(xi_i)
    s_scale = np.linalg.norm(k_xi) + abs(gamma_i) * np.linalg.norm(eta_i)
    r_norm = np.linalg.norm(r)
    s_norm = np.linalg.norm(s)

    if r_norm <= BREAKDOWN_TOL * r_scale or s_norm <= BREAKDOWN_TOL * s_scale:
        basis.alpha.append(alpha_i)
        basis.gamma.append(gamma_i)
        basis.complete = True
        return StepOutcome(StepStatus.LUCKY_BREAKDOWN, alpha=alpha_i,
                           gamma=gamma_i, r_norm=r_norm, s_norm=s_norm)

    p = float(r @ s)
    if abs(p) <= BREAKDOWN_TOL * r_norm * s_norm:
        return StepOutcome(StepStatus.SERIOUS_BREAKDOWN, alpha=alpha_i,
                           gamma=gamma_i, r_norm=r_norm, s_norm=s_norm, rs=p)

    beta_next = math.sqrt(abs(p))
    delta_next = math.copysign(beta_next, p)
    new_xi = r / beta_next
    new_eta = s / delta_next

    basis.alpha.append(alpha_i)
    basis.gamma.append(gamma_i)
    basis.beta.append(beta_next)
    basis.delta.append(delta_next)
    basis.append_pair(new_xi, new_eta)
    return StepOutcome(StepStatus.EXTENDED, alpha=alpha_i, gamma=gamma_i,
                       beta_next=beta_next, delta_next=delta_next,
                       new_xi=new_xi, new_eta=new_eta,
                       r_norm=r_norm, s_norm=s_norm, rs=p)


def tridiagonal_matrices(basis: BiorthBasis) -> tuple[np.ndarray, np.ndarray]:
    """Projected matrices of order m = completed steps.

    K_tilde has diagonal gamma_1..gamma_m and off-diagonal delta_2..delta_m;
    T_tilde has diagonal alpha_1..alpha_m and off-diagonal beta_2..beta_m.
    They equal the dense projections (xi_i K xi_j) and (eta_i T eta_j) over
    the first m pairs.
    """
    m = basis.steps
    if m < 1:
        raise InvalidParameter("no completed steps; take a step first")
    t_tilde = np.diag(np.asarray(basis.alpha, dtype=np.float64))
    k_tilde = np.diag(np.asarray(basis.gamma, dtype=np.float64))
    if m > 1:
        off_t = np.asarray(basis.beta[:m - 1], dtype=np.float64)
        off_k = np.asarray(basis.delta[:m - 1], dtype=np.float64)
        idx = np.arange(m - 1)
        t_tilde[idx, idx + 1] = off_t
        t_tilde[idx + 1, idx] = off_t
        k_tilde[idx, idx + 1] = off_k
        k_tilde[idx + 1, idx] = off_k
    return k_tilde, t_tilde
