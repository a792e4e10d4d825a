import numpy as np
import pytest

from oscmodes import (ExplicitOperator, InvalidParameter, NonSquare,
                      NotSymmetricHeader, ParseError, SolverConfig,
                      SparseSymMatrix, gen_random_spd, solve_lowest)
from oscmodes.fileio import (read_history_csv, read_matrix_market,
                             write_history_csv, write_matrix_market)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path


class TestReadMatrixMarket:
    def test_hand_written_fixture(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real symmetric",
            "% the smalldense Cholesky example matrix",
            "2 2 3",
            "1 1 4.0",
            "2 1 2.0",
            "2 2 5.0",
        ])
        m = read_matrix_market(path)
        assert np.array_equal(m.toarray(), [[4.0, 2.0], [2.0, 5.0]])

    def test_general_header_rejected(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real general",
            "2 2 1", "1 1 1.0",
        ])
        with pytest.raises(NotSymmetricHeader):
            read_matrix_market(path)

    def test_non_square_rejected(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 3 1", "1 1 1.0",
        ])
        with pytest.raises(NonSquare):
            read_matrix_market(path)

    def test_missing_banner(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", ["1 1 1", "1 1 2.0"])
        with pytest.raises(ParseError, match="line 1"):
            read_matrix_market(path)

    def test_unsupported_field(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate complex symmetric",
            "1 1 1", "1 1 1.0 0.0",
        ])
        with pytest.raises(ParseError, match="complex"):
            read_matrix_market(path)

    def test_malformed_entry_reports_line(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 2 2", "1 1 1.0", "2 1 not-a-number",
        ])
        with pytest.raises(ParseError, match="line 4"):
            read_matrix_market(path)

    def test_out_of_range_index(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 2 1", "3 1 1.0",
        ])
        with pytest.raises(ParseError, match="out of range"):
            read_matrix_market(path)

    def test_wrong_entry_count(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 2 3", "1 1 1.0", "2 2 1.0",
        ])
        with pytest.raises(ParseError, match="expected 3"):
            read_matrix_market(path)

    def test_duplicate_entries(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 2 2", "2 1 1.0", "2 1 1.0",
        ])
        with pytest.raises(ParseError, match="duplicate"):
            read_matrix_market(path)

    def test_upper_triangle_entries_accepted(self, tmp_path):
        path = write_lines(tmp_path / "m.mtx", [
            "%%MatrixMarket matrix coordinate real symmetric",
            "2 2 2", "1 2 3.0", "2 2 1.0",
        ])
        m = read_matrix_market(path)
        assert np.array_equal(m.toarray(), [[0.0, 3.0], [3.0, 1.0]])


def test_write_then_read_round_trip(tmp_path):
    matrix = gen_random_spd(80, 10, seed=13)
    path = tmp_path / "gen.mtx"
    write_matrix_market(matrix, path)
    back = read_matrix_market(path)
    r0, c0, v0 = matrix.tocoo()
    r1, c1, v1 = back.tocoo()
    assert np.array_equal(r0, r1) and np.array_equal(c0, c1)
    assert np.array_equal(v0, v1)


class TestHistoryCsv:
    def run_identity(self):
        op = ExplicitOperator(SparseSymMatrix.identity(6))
        return solve_lowest(op, op, SolverConfig(n_eigs=1, seed=2))

    def test_single_step_history_two_lines(self, tmp_path):
        modes = self.run_identity()
        path = tmp_path / "h.csv"
        write_history_csv(modes.history, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + len(modes.history.rows) == 2
        assert lines[0] == "step,basis_n,op_applies,omega_min,rho_k,rho_t,biorth_err"

    def test_identity_run_omega_column(self, tmp_path):
        modes = self.run_identity()
        path = tmp_path / "h.csv"
        write_history_csv(modes.history, path)
        for line in path.read_text().splitlines()[1:]:
            assert float(line.split(",")[3]) == 1.0

    def test_round_trip(self, tmp_path):
        K = gen_random_spd(120, 8, seed=5)
        T = gen_random_spd(120, 8, seed=6)
        modes = solve_lowest(ExplicitOperator(K), ExplicitOperator(T),
                             SolverConfig(n_eigs=1, seed=5))
        path = tmp_path / "h.csv"
        write_history_csv(modes.history, path)
        back = read_history_csv(path)
        assert back.rows == modes.history.rows

    def test_empty_history_rejected(self, tmp_path):
        from oscmodes import ConvergenceRecord
        with pytest.raises(InvalidParameter):
            write_history_csv(ConvergenceRecord(), tmp_path / "h.csv")
