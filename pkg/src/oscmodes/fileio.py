"""Matrix Market ingestion/emission and the convergence-history CSV."""

from __future__ import annotations

from .driver import ConvergenceRecord
from .errors import (InvalidParameter, NonSquare, NotSymmetricHeader,
                     ParseError)
from .operators import SparseSymMatrix

CSV_HEADER = "step,basis_n,op_applies,omega_min,rho_k,rho_t,biorth_err"


def read_matrix_market(path) -> SparseSymMatrix:
    """Read a coordinate real symmetric Matrix Market file.

    Entries are 1-based and may carry either triangle; off-diagonal entries
    are mirrored on load. Duplicates, out-of-range indices and malformed
    lines raise ParseError with the offending line number.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()
    if not lines:
        raise ParseError("empty file", line=1)

    banner = lines[0].split()
    if len(banner) != 5 or banner[0] != "%%MatrixMarket":
        raise ParseError("missing %%MatrixMarket banner", line=1)
    obj, fmt, fld, sym = (tok.lower() for tok in banner[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise ParseError(f"unsupported header '{obj} {fmt}'", line=1)
    if fld != "real":
        raise ParseError(f"unsupported field '{fld}'", line=1)
    if sym != "symmetric":
        raise NotSymmetricHeader(f"header declares '{sym}', need symmetric", line=1)

    lineno = 1
    size_line = None
    for lineno, raw in enumerate(lines[1:], start=2):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        size_line = text
        break
    if size_line is None:
        raise ParseError("missing size line", line=lineno)
    parts = size_line.split()
    if len(parts) != 3:
        raise ParseError("size line must be 'rows cols nnz'", line=lineno)
    try:
        n_rows, n_cols, n_entries = (int(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"bad size line: {exc}", line=lineno) from None
    if n_rows != n_cols:
        raise NonSquare(f"matrix is {n_rows}x{n_cols}", line=lineno)

    rows, cols, vals = [], [], []
    seen = 0
    for entry_line, raw in enumerate(lines[lineno:], start=lineno + 1):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        parts = text.split()
        if len(parts) != 3:
            raise ParseError("entry must be 'i j value'", line=entry_line)
        try:
            i = int(parts[0]) - 1
            j = int(parts[1]) - 1
            v = float(parts[2])
        except ValueError as exc:
            raise ParseError(f"bad entry: {exc}", line=entry_line) from None
        if not (0 <= i < n_rows and 0 <= j < n_cols):
            raise ParseError(f"index ({i + 1}, {j + 1}) out of range",
                             line=entry_line)
        rows.append(i)
        cols.append(j)
        vals.append(v)
        if i != j:
            rows.append(j)
            cols.append(i)
            vals.append(v)
        seen += 1
    if seen != n_entries:
        raise ParseError(f"expected {n_entries} entries, found {seen}",
                         line=len(lines))
    try:
        return SparseSymMatrix.from_coo(n_rows, rows, cols, vals)
    except InvalidParameter as exc:
        raise ParseError(str(exc)) from exc


def write_matrix_market(matrix: SparseSymMatrix, path):
    """Write the lower triangle in coordinate real symmetric format."""
    rows, cols, vals = matrix.tocoo()
    keep = rows >= cols
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        fh.write(f"{matrix.dim} {matrix.dim} {rows.size}\n")
        for i, j, v in zip(rows, cols, vals):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")


def write_history_csv(history: ConvergenceRecord, path):
    """One row per outer step; floats carry 17 significant digits so runs
    can be compared bit for bit."""
    if not history.rows:
        raise InvalidParameter("history is empty")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in history.rows:
            fh.write(f"{row.step},{row.basis_n},{row.op_applies},"
                     f"{row.omega_min:.17g},{row.rho_k:.17g},"
                     f"{row.rho_t:.17g},{row.biorth_err:.17g}\n")


def read_history_csv(path) -> ConvergenceRecord:
    """Round-trip companion of :func:`write_history_csv` (phase boundaries
    and pairing diagnostics are not part of the file format)."""
    from .driver import HistoryRow

    record = ConvergenceRecord()
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ParseError(f"unexpected header '{header}'", line=1)
        for lineno, raw in enumerate(fh, start=2):
            text = raw.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 7:
                raise ParseError("expected 7 columns", line=lineno)
            record.rows.append(HistoryRow(
                step=int(parts[0]), basis_n=int(parts[1]),
                op_applies=int(parts[2]), omega_min=float(parts[3]),
                rho_k=float(parts[4]), rho_t=float(parts[5]),
                biorth_err=float(parts[6])))
    return record
