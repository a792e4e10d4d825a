import numpy as np
import pytest

from oscmodes import (DegeneratePair, ExplicitOperator, InvalidParameter,
                      InverseMassOperator, MaxIterations, SolverConfig,
                      SparseSymMatrix, deflate, dense_spectrum,
                      gen_random_spd, generate_problem, residual_norms,
                      solve_lowest)
from oscmodes.driver import _empty_modeset, restart_basis
from oscmodes.projected import RitzPair
from oscmodes.recursion import StepStatus, step
from oscmodes.rng import SplitMix64
from tests.conftest import sparse_spd


def modeset_from_oracle(K, T, count):
    spec = dense_spectrum(K, T, with_modes=True)
    ms = _empty_modeset(K.dim)
    ms.omegas = spec.omegas[:count].copy()
    ms.xi = spec.xi[:count].copy()
    ms.eta = spec.eta[:count].copy()
    return ms


class TestSolveLowest:
    def test_identity_problem_converges_at_basis_one(self):
        op = ExplicitOperator(SparseSymMatrix.identity(10))
        modes = solve_lowest(op, op, SolverConfig(n_eigs=1, seed=5))
        assert modes.omegas[0] == pytest.approx(1.0, rel=1e-12)
        assert modes.history.rows[0].basis_n == 1
        assert len(modes.history.rows) == 1

    def test_decoupled_oscillators(self):
        Kop = ExplicitOperator(SparseSymMatrix.diagonal([1.0, 4.0, 9.0]))
        Top = ExplicitOperator(SparseSymMatrix.identity(3))
        modes = solve_lowest(Kop, Top, SolverConfig(n_eigs=3, seed=2))
        assert np.allclose(modes.omegas, [1.0, 2.0, 3.0], rtol=1e-10)

    def test_two_dimensional_problem(self):
        Kop = ExplicitOperator(SparseSymMatrix.diagonal([1.0, 4.0]))
        Top = ExplicitOperator(SparseSymMatrix.identity(2))
        modes = solve_lowest(Kop, Top, SolverConfig(n_eigs=2, seed=3))
        assert np.allclose(modes.omegas, [1.0, 2.0], rtol=1e-10)

    def test_matches_oracle_on_random_sparse(self):
        K, T = generate_problem(300, 10, seed=8)
        modes = solve_lowest(ExplicitOperator(K), ExplicitOperator(T),
                             SolverConfig(n_eigs=3, seed=8))
        expected = dense_spectrum(K, T).omegas[:3]
        assert np.allclose(modes.omegas, expected, rtol=1e-9)

    def test_returned_modes_satisfy_contract(self):
        K, T = generate_problem(200, 8, seed=4)
        Kop, Top = ExplicitOperator(K), ExplicitOperator(T)
        config = SolverConfig(n_eigs=4, seed=4)
        modes = solve_lowest(Kop, Top, config)
        assert (np.diff(modes.omegas) >= 0).all()
        assert (modes.omegas > 0).all()
        for omega, xi, eta in modes.pairs:
            assert xi @ eta == pytest.approx(1.0, abs=1e-10)
            pair = RitzPair(omega=omega, u=np.zeros(0), v=np.zeros(0),
                            xi=xi, eta=eta)
            assert max(residual_norms(Kop, Top, pair)) <= config.tol
        # cross-pair biorthogonality
        gram = modes.xi @ modes.eta.T
        assert np.abs(gram - np.eye(len(modes))).max() <= 1e-8

    def test_hermitian_reduction_small(self, rng):
        K = sparse_spd(rng, 60)
        op = ExplicitOperator(K)
        modes = solve_lowest(op, op, SolverConfig(n_eigs=3, seed=6))
        expected = np.linalg.eigvalsh(K.toarray())[:3]
        assert np.allclose(modes.omegas, expected, rtol=1e-9)

    def test_inverse_mass_route_matches_explicit_inverse(self, rng):
        K = sparse_spd(rng, 40)
        M = sparse_spd(rng, 40)
        t_dense = np.linalg.inv(M.toarray())
        t_dense = 0.5 * (t_dense + t_dense.T)
        via_mass = solve_lowest(ExplicitOperator(K), InverseMassOperator(M),
                                SolverConfig(n_eigs=2, seed=9))
        via_explicit = solve_lowest(
            ExplicitOperator(K),
            ExplicitOperator(SparseSymMatrix.from_dense(t_dense)),
            SolverConfig(n_eigs=2, seed=9))
        assert np.allclose(via_mass.omegas, via_explicit.omegas, rtol=1e-8)

    def test_inverse_mass_solves_the_secular_equation(self, rng):
        # omega^2 M xi = K xi: frequencies are the square roots of the
        # generalized eigenvalues (independent oracle: LAPACK sygv)
        from scipy.linalg import eigh as generalized_eigh
        K = sparse_spd(rng, 30)
        M = sparse_spd(rng, 30)
        w2 = generalized_eigh(K.toarray(), M.toarray(), eigvals_only=True)
        modes = solve_lowest(ExplicitOperator(K), InverseMassOperator(M),
                             SolverConfig(n_eigs=3, seed=12))
        assert np.allclose(modes.omegas, np.sqrt(w2[:3]), rtol=1e-8)

    def test_determinism(self):
        K, T = generate_problem(150, 8, seed=3)
        runs = [solve_lowest(ExplicitOperator(K), ExplicitOperator(T),
                             SolverConfig(n_eigs=2, seed=11))
                for _ in range(2)]
        assert np.array_equal(runs[0].omegas, runs[1].omegas)
        assert runs[0].history.rows == runs[1].history.rows

    def test_history_monotone_within_phase_and_across_restarts(self):
        K, T = generate_problem(200, 8, seed=15)
        config = SolverConfig(n_eigs=1, seed=15, max_basis=10)
        modes = solve_lowest(ExplicitOperator(K), ExplicitOperator(T), config)
        history = modes.history
        assert len(history.phase_starts) > 1  # restarts actually happened
        rows = history.rows
        bounds = history.phase_starts + [len(rows)]
        for lo, hi in zip(bounds, bounds[1:]):
            omegas = [rows[i].omega_min for i in range(lo, hi)]
            assert all(b <= a * (1 + 1e-12) for a, b in zip(omegas, omegas[1:]))
        # restarting never raises the lowest recorded Ritz value
        running = np.array([r.omega_min for r in rows])
        assert (running[1:] <= np.minimum.accumulate(running)[:-1] * (1 + 1e-10)).all()

    def test_op_applies_strictly_increasing(self):
        K, T = generate_problem(100, 6, seed=21)
        modes = solve_lowest(ExplicitOperator(K), ExplicitOperator(T),
                             SolverConfig(n_eigs=1, seed=21))
        applies = [r.op_applies for r in modes.history.rows]
        assert all(b > a for a, b in zip(applies, applies[1:]))

    def test_restart_budget_exhaustion_returns_partial(self):
        K, T = generate_problem(200, 8, seed=2)
        config = SolverConfig(n_eigs=5, tol=1e-13, max_basis=3,
                              max_restarts=2, seed=2)
        with pytest.raises(MaxIterations) as info:
            solve_lowest(ExplicitOperator(K), ExplicitOperator(T), config)
        partial = info.value.modes
        assert partial is not None
        assert len(partial.history.rows) > 0
        assert len(partial) < 5

    def test_not_spd_operator_failure_propagates(self):
        from oscmodes import NotSPD
        K = SparseSymMatrix.identity(6)
        bad_mass = SparseSymMatrix.diagonal([1.0, 1.0, -1.0, 1.0, 1.0, 1.0])
        with pytest.raises(NotSPD):
            solve_lowest(ExplicitOperator(K), InverseMassOperator(bad_mass),
                         SolverConfig(n_eigs=1, seed=1))

    def test_serious_breakdown_triggers_restart(self, monkeypatch):
        import oscmodes.driver as drv
        from oscmodes.recursion import StepOutcome
        real_step = drv.step
        tripped = {"count": 0}

        def flaky_step(Kop, Top, basis, full_rebiorth=True):
            if tripped["count"] == 3:
                tripped["count"] += 1
                return StepOutcome(StepStatus.SERIOUS_BREAKDOWN, alpha=1.0,
                                   gamma=1.0, r_norm=1.0, s_norm=1.0, rs=0.0)
            tripped["count"] += 1
            return real_step(Kop, Top, basis, full_rebiorth=full_rebiorth)

        monkeypatch.setattr(drv, "step", flaky_step)
        K, T = generate_problem(100, 6, seed=31)
        modes = drv.solve_lowest(ExplicitOperator(K), ExplicitOperator(T),
                                 SolverConfig(n_eigs=1, seed=31))
        expected = dense_spectrum(K, T).omegas[0]
        assert modes.omegas[0] == pytest.approx(expected, rel=1e-9)
        assert len(modes.history.phase_starts) >= 2  # the recovery restart

    def test_config_validation(self):
        op = ExplicitOperator(SparseSymMatrix.identity(4))
        with pytest.raises(InvalidParameter):
            solve_lowest(op, op, SolverConfig(n_eigs=5))
        with pytest.raises(InvalidParameter):
            solve_lowest(op, op, SolverConfig(tol=2.0))
        with pytest.raises(InvalidParameter):
            solve_lowest(op, op, SolverConfig(max_basis=2))

    def test_dimension_mismatch(self):
        a = ExplicitOperator(SparseSymMatrix.identity(3))
        b = ExplicitOperator(SparseSymMatrix.identity(4))
        with pytest.raises(InvalidParameter):
            solve_lowest(a, b, SolverConfig())


class TestDeflate:
    def test_empty_set_is_identity(self, rng):
        xi = rng.standard_normal(10)
        eta = rng.standard_normal(10)
        out_xi, out_eta = deflate(xi, eta, _empty_modeset(10))
        assert np.array_equal(out_xi, xi) and np.array_equal(out_eta, eta)

    def test_postconditions_random_case(self, rng):
        K = sparse_spd(rng, 100)
        T = sparse_spd(rng, 100)
        converged = modeset_from_oracle(K, T, 3)
        xi, eta = deflate(rng.standard_normal(100), rng.standard_normal(100),
                          converged)
        assert np.abs(converged.eta @ xi).max() <= 1e-12 * np.linalg.norm(xi)
        assert np.abs(converged.xi @ eta).max() <= 1e-12 * np.linalg.norm(eta)

    def test_annihilates_own_range(self, rng):
        K = sparse_spd(rng, 30)
        T = sparse_spd(rng, 30)
        converged = modeset_from_oracle(K, T, 1)
        with pytest.raises(DegeneratePair):
            deflate(converged.xi[0].copy(), converged.eta[0].copy(), converged)


class TestRestartBasis:
    def test_restart_from_exact_eigenpair_is_a_fixed_point(self, rng):
        K = sparse_spd(rng, 25)
        T = sparse_spd(rng, 25)
        spec = dense_spectrum(K, T, with_modes=True)
        best = RitzPair(omega=float(spec.omegas[0]), u=np.ones(1), v=np.ones(1),
                        xi=spec.xi[0], eta=spec.eta[0])
        basis = restart_basis(best, _empty_modeset(25), SplitMix64(1),
                              25, capacity=4)
        out = step(ExplicitOperator(K), ExplicitOperator(T), basis)
        assert out.status is StepStatus.LUCKY_BREAKDOWN
        omega = np.sqrt(basis.alpha[0] * basis.gamma[0])
        assert omega == pytest.approx(spec.omegas[0], rel=1e-10)

    def test_restart_biorthogonal_to_converged(self):
        Kop = ExplicitOperator(SparseSymMatrix.diagonal([1.0, 4.0]))
        Top = ExplicitOperator(SparseSymMatrix.identity(2))
        modes = solve_lowest(Kop, Top, SolverConfig(n_eigs=1, seed=1))
        basis = restart_basis(None, modes, SplitMix64(7), 2, capacity=4)
        assert abs(modes.eta[0] @ basis.xi_vectors[0]) <= 1e-10
        assert abs(modes.xi[0] @ basis.eta_vectors[0]) <= 1e-10

    def test_exhausted_dimension_raises(self):
        Kop = ExplicitOperator(SparseSymMatrix.diagonal([1.0, 4.0]))
        Top = ExplicitOperator(SparseSymMatrix.identity(2))
        modes = solve_lowest(Kop, Top, SolverConfig(n_eigs=2, seed=1))
        with pytest.raises(DegeneratePair):
            restart_basis(None, modes, SplitMix64(3), 2, capacity=4)
