"""Minimum-principle diagnostics, independent of the solver by design.

The lowest frequency is the global minimum of

    E(xi, eta) = [(xi, K xi) + (eta, T eta)] / (2 |(xi, eta)|)

over all phase-space configurations, and every mode is a stationary point.
Stationarity is checked by central finite differences rather than an
analytic gradient so the check shares no code with the solver it validates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePair, DimensionMismatch
from .operators import SparseSymMatrix

DIVERGENCE_TOL = 1e-300


@dataclass(frozen=True)
class RpaForm:
    """Equivalent (A, B)/(x, y) representation used in RPA-style theories:
    A = (K+T)/2, B = (K-T)/2, x = (xi+eta)/2, y = (xi-eta)/2."""

    a: SparseSymMatrix
    b: SparseSymMatrix
    x: np.ndarray
    y: np.ndarray


def energy_functional(Kop, Top, xi: np.ndarray, eta: np.ndarray) -> float:
    """Harmonic energy per unit of |(xi, eta)|; strictly positive for SPD
    inputs and equal to omega at any exact mode."""
    overlap = abs(float(xi @ eta))
    if overlap <= DIVERGENCE_TOL:
        raise DegeneratePair("(xi, eta) vanishes; the functional diverges")
    return (float(xi @ Kop.apply(xi)) + float(eta @ Top.apply(eta))) / (2.0 * overlap)


def stationarity_residual(Kop, Top, xi: np.ndarray, eta: np.ndarray,
                          h: float = 1e-4) -> float:
    """Max |directional derivative| of the functional over all 2N coordinate
    directions, each probed by a central difference with step h times the
    perturbed vector's norm.

    Costs 4N functional evaluations (each two operator applies): desk scale
    only. O(h^2) plus rounding at a stationary point.
    """
    n = xi.shape[0]
    if eta.shape[0] != n:
        raise DimensionMismatch("xi and eta lengths differ")
    step_xi = h * np.linalg.norm(xi)
    step_eta = h * np.linalg.norm(eta)
    worst = 0.0
    probe = np.zeros(n)
    for j in range(n):
        probe[j] = step_xi
        plus = energy_functional(Kop, Top, xi + probe, eta)
        minus = energy_functional(Kop, Top, xi - probe, eta)
        worst = max(worst, abs(plus - minus) / (2.0 * step_xi))
        probe[j] = step_eta
        plus = energy_functional(Kop, Top, xi, eta + probe)
        minus = energy_functional(Kop, Top, xi, eta - probe)
        worst = max(worst, abs(plus - minus) / (2.0 * step_eta))
        probe[j] = 0.0
    return worst


def to_thouless(K: SparseSymMatrix, T: SparseSymMatrix,
                xi: np.ndarray, eta: np.ndarray) -> RpaForm:
    """Change of variables to the RPA form: A = (K+T)/2, B = (K-T)/2,
    x = (xi+eta)/2, y = (xi-eta)/2."""
    if K.dim != T.dim or xi.shape[0] != K.dim or eta.shape[0] != K.dim:
        raise DimensionMismatch("K, T, xi, eta dimensions do not conform")
    a = SparseSymMatrix((K.csr + T.csr) * 0.5)
    b = SparseSymMatrix((K.csr - T.csr) * 0.5)
    return RpaForm(a=a, b=b, x=(xi + eta) * 0.5, y=(xi - eta) * 0.5)


def from_thouless(form: RpaForm
                  ) -> tuple[SparseSymMatrix, SparseSymMatrix, np.ndarray, np.ndarray]:
    """Inverse of :func:`to_thouless`: K = A+B, T = A-B, xi = x+y, eta = x-y."""
    K = SparseSymMatrix(form.a.csr + form.b.csr)
    T = SparseSymMatrix(form.a.csr - form.b.csr)
    return K, T, form.x + form.y, form.x - form.y
