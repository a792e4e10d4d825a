"""Outer iteration: grow the basis, solve the projected pencil, lock
converged modes one at a time, deflate, restart.

Restart policy is memory-driven: the basis grows to ``max_basis`` pairs and
then collapses to a single pair built from the best Ritz pair so far. A
Ritz pair restarted this way reproduces its Ritz value exactly at basis
size one ((xi K xi) = (eta T eta) = omega for a normalized Ritz pair), so
the recorded lowest frequency never regresses across restarts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import variational
from .errors import (DegeneratePair, InvalidParameter, MaxIterations, NotSPD)
from .projected import (ProjectedPencil, RitzPair, assemble_ritz,
                        pairing_residual, residual_norms, solve_projected)
from .recursion import (BiorthBasis, StepStatus, init_pair, step,
                        tridiagonal_matrices)
from .rng import SplitMix64

PERTURB_SCALE = 1e-8  # relative noise on serious-breakdown restarts
DEFLATE_VANISH_TOL = 1e-14
DEFLATE_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of one solve; everything that affects the run is in here, so a
    fixed config (seed included) reproduces the history bit for bit."""

    n_eigs: int = 1
    tol: float = 1e-8
    max_basis: int = 80
    max_restarts: int = 200
    full_rebiorth: bool = True
    seed: int = 1
    record_history: bool = True

    def validate(self, dim: int):
        if not 1 <= self.n_eigs <= dim:
            raise InvalidParameter(f"n_eigs must be in [1, {dim}]")
        if not 0.0 < self.tol < 1.0:
            raise InvalidParameter("tol must be in (0, 1)")
        if self.max_basis < 3:
            raise InvalidParameter("max_basis must be at least 3")
        if self.max_restarts < 1:
            raise InvalidParameter("max_restarts must be at least 1")


@dataclass(frozen=True)
class HistoryRow:
    step: int
    basis_n: int
    op_applies: int
    omega_min: float
    rho_k: float
    rho_t: float
    biorth_err: float


@dataclass
class ConvergenceRecord:
    """Per-outer-step trace of one solve.

    ``rows`` carries the CSV-facing columns; ``pairing_residuals`` holds the
    projected +/-omega companion check made at every recorded step, and
    ``phase_starts`` the row indices where a growth phase began (used by the
    monotonicity checks, which hold only within a phase).
    """

    rows: list[HistoryRow] = field(default_factory=list)
    pairing_residuals: list[float] = field(default_factory=list)
    phase_starts: list[int] = field(default_factory=list)

    def append(self, row: HistoryRow, pairing: float):
        if self.rows and row.op_applies <= self.rows[-1].op_applies:
            raise InvalidParameter("operator-apply counter must be increasing")
        self.rows.append(row)
        self.pairing_residuals.append(pairing)

    def mark_phase(self):
        self.phase_starts.append(len(self.rows))


@dataclass
class ModeSet:
    """Converged modes, frequencies ascending, (xi_i, eta_i) = 1."""

    omegas: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    history: ConvergenceRecord

    def __len__(self) -> int:
        return self.omegas.shape[0]

    @property
    def pairs(self):
        return [(float(self.omegas[i]), self.xi[i], self.eta[i])
                for i in range(len(self))]


def _empty_modeset(dim: int) -> ModeSet:
    return ModeSet(omegas=np.zeros(0), xi=np.zeros((0, dim)),
                   eta=np.zeros((0, dim)), history=ConvergenceRecord())


def deflate(xi: np.ndarray, eta: np.ndarray, converged: ModeSet
            ) -> tuple[np.ndarray, np.ndarray]:
    """Project the converged components out of a candidate pair:
    xi' = xi - sum_c (eta_c, xi) xi_c and eta' = eta - sum_c (xi_c, eta) eta_c.

    A refinement pass squashes rounding so the projected pair is orthogonal
    to every converged pair to 1e-12 relative. Raises DegeneratePair when
    the inputs lay (numerically) inside the converged span.
    """
    if len(converged) == 0:
        return xi, eta
    xi_c = converged.xi
    eta_c = converged.eta
    nx0 = np.linalg.norm(xi)
    ny0 = np.linalg.norm(eta)
    for _ in range(2):
        xi = xi - xi_c.T @ (eta_c @ xi)
        eta = eta - eta_c.T @ (xi_c @ eta)
    nx = np.linalg.norm(xi)
    ny = np.linalg.norm(eta)
    if nx <= DEFLATE_VANISH_TOL * nx0 or ny <= DEFLATE_VANISH_TOL * ny0:
        raise DegeneratePair("candidate pair lies in the converged span")
    if (np.abs(eta_c @ xi).max() > DEFLATE_RESIDUAL_TOL * nx
            or np.abs(xi_c @ eta).max() > DEFLATE_RESIDUAL_TOL * ny):
        raise DegeneratePair("deflation could not be certified; resample")
    return xi, eta


def restart_basis(best: RitzPair | None, converged: ModeSet, rng: SplitMix64,
                  dim: int, *, capacity: int, hermitian: bool = False,
                  against=None) -> BiorthBasis:
    """Size-1 basis for the next growth phase.

    Built from the best unconverged Ritz pair when one is given, otherwise
    (and on any DegeneratePair) from seeded random pairs; three failed
    resamples escalate, signalling the search space is exhausted.
    ``against`` optionally supplies extra (X, Y) vector families the random
    pair is biorthogonalized against (used after lucky breakdowns, where the
    exhausted invariant subspace must be left entirely).
    """
    defl = (converged.xi, converged.eta) if len(converged) else None
    candidate = best
    for _ in range(3):
        try:
            if candidate is not None:
                xi0, eta0 = deflate(candidate.xi, candidate.eta, converged)
            else:
                xi0 = rng.uniform(dim)
                eta0 = xi0.copy() if hermitian else rng.uniform(dim)
                xi0, eta0 = deflate(xi0, eta0, converged)
                if against is not None:
                    X, Y = against
                    for _ in range(2):
                        xi0 = xi0 - X.T @ (Y @ xi0)
                        eta0 = eta0 - Y.T @ (X @ eta0)
            return init_pair(xi0, eta0, deflation=defl, capacity=capacity)
        except DegeneratePair:
            candidate = None
    raise DegeneratePair(
        "three successive restart candidates were degenerate; "
        "requested modes plus basis exceed the problem dimension")


class _CountingOperator:
    """Driver-owned wrapper tallying operator applications for the history."""

    def __init__(self, op):
        self._op = op
        self.count = 0

    @property
    def dim(self):
        return self._op.dim

    def apply(self, x):
        self.count += 1
        return self._op.apply(x)


def _perturbed(pair: RitzPair, rng: SplitMix64) -> RitzPair:
    noise = PERTURB_SCALE * np.linalg.norm(pair.xi) * rng.uniform(pair.xi.shape[0])
    xi = pair.xi + noise
    noise = PERTURB_SCALE * np.linalg.norm(pair.eta) * rng.uniform(pair.eta.shape[0])
    eta = pair.eta + noise
    return RitzPair(omega=pair.omega, u=pair.u, v=pair.v, xi=xi, eta=eta)


def solve_lowest(Kop, Top, config: SolverConfig) -> ModeSet:
    """Compute the ``config.n_eigs`` lowest frequencies and their modes.

    Modes are locked one at a time, smallest first: a mode converges when
    both relative residuals drop below ``config.tol`` (checked once the
    projected order reaches 3, or at any order when a lucky breakdown has
    closed an invariant subspace, which makes the pencil exact). Each
    locked pair is validated against the energy functional before being
    accepted. Raises MaxIterations with the partial ModeSet in the payload
    when the restart budget runs out.
    """
    if Kop.dim != Top.dim:
        raise InvalidParameter("K and T operators have different dimensions")
    dim = Kop.dim
    config.validate(dim)
    hermitian = Kop is Top

    rng = SplitMix64(config.seed)
    Kc = _CountingOperator(Kop)
    Tc = _CountingOperator(Top)
    history = ConvergenceRecord()
    locked: list[tuple[float, np.ndarray, np.ndarray]] = []

    def current_modeset() -> ModeSet:
        if locked:
            order = np.argsort([w for w, _, _ in locked], kind="stable")
            omegas = np.array([locked[i][0] for i in order])
            xi = np.vstack([locked[i][1] for i in order])
            eta = np.vstack([locked[i][2] for i in order])
        else:
            omegas, xi, eta = np.zeros(0), np.zeros((0, dim)), np.zeros((0, dim))
        return ModeSet(omegas=omegas, xi=xi, eta=eta, history=history)

    capacity = config.max_basis + 1
    restarts = 0
    outer_step = 0

    def next_phase(best: RitzPair | None, against=None) -> BiorthBasis:
        nonlocal restarts
        restarts += 1
        if restarts > config.max_restarts:
            raise MaxIterations(
                f"restart budget {config.max_restarts} exhausted with "
                f"{len(locked)}/{config.n_eigs} modes converged",
                modes=current_modeset())
        history.mark_phase()
        return restart_basis(best, current_modeset(), rng, dim,
                             capacity=capacity, hermitian=hermitian,
                             against=against)

    history.mark_phase()
    basis = restart_basis(None, current_modeset(), rng, dim,
                          capacity=capacity, hermitian=hermitian)
    best_pair: RitzPair | None = None

    while True:
        outcome = step(Kc, Tc, basis, full_rebiorth=config.full_rebiorth)
        outer_step += 1

        if outcome.status is StepStatus.SERIOUS_BREAKDOWN:
            seed_pair = _perturbed(best_pair, rng) if best_pair is not None else None
            basis = next_phase(seed_pair)
            best_pair = None
            continue

        pencil = ProjectedPencil(*tridiagonal_matrices(basis))
        try:
            solutions = solve_projected(pencil)
        except NotSPD:
            basis = next_phase(best_pair)
            best_pair = None
            continue

        lowest = solutions[0]
        pair = assemble_ritz(basis, lowest.u, lowest.v, lowest.omega)
        rho_k, rho_t = residual_norms(Kc, Tc, pair)
        if config.record_history:
            history.append(HistoryRow(step=outer_step, basis_n=basis.n,
                                      op_applies=Kc.count + Tc.count,
                                      omega_min=pair.omega, rho_k=rho_k,
                                      rho_t=rho_t,
                                      biorth_err=basis.biorth_error),
                           pairing=pairing_residual(pencil, lowest))
        best_pair = pair

        if max(rho_k, rho_t) <= config.tol and (pencil.order >= 3 or basis.complete):
            overlap = float(pair.xi @ pair.eta)
            energy = variational.energy_functional(Kc, Tc, pair.xi, pair.eta)
            if overlap > 0.0 and abs(energy - pair.omega) <= 10 * config.tol * pair.omega:
                scale = np.sqrt(overlap)
                locked.append((pair.omega, pair.xi / scale, pair.eta / scale))
                if len(locked) == config.n_eigs:
                    return current_modeset()
                runner_up = (assemble_ritz(basis, solutions[1].u, solutions[1].v,
                                           solutions[1].omega)
                             if pencil.order >= 2 else None)
                basis = next_phase(runner_up)
                best_pair = None
                continue

        if basis.complete:
            # invariant subspace exhausted without (further) convergence
            against = (basis.xi_vectors.copy(), basis.eta_vectors.copy())
            basis = next_phase(None, against=against)
            best_pair = None
            continue

        if basis.n >= config.max_basis:
            basis = next_phase(best_pair)
            best_pair = None
