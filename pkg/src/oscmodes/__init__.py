"""Matrix-free solver for the lowest frequencies of classical small
oscillations, posed as the paired problem K xi = omega eta, T eta = omega xi
with K and T symmetric positive definite.

The solver combines a two-sided Lanczos recursion (biorthogonal Krylov
bases built from repeated applications of K and T) with an exact solve of
the projected tridiagonal pencil; a dense desk-scale oracle, variational
diagnostics, a random problem generator and a CLI round out the package.
"""

from .driver import ConvergenceRecord, ModeSet, SolverConfig, deflate, solve_lowest
from .errors import (DegeneratePair, DimensionMismatch, InvalidParameter,
                     MaxIterations, NonSquare, NotSPD, NotSymmetricHeader,
                     OscmodesError, ParseError, SingularFactor, SizeGuard)
from .operators import (ExplicitOperator, InverseMassOperator,
                        SparseSymMatrix, cg_solve)
from .oracle import DenseSpectrum, dense_spectrum, gen_random_spd, generate_problem
from .projected import (ProjectedPencil, RitzPair, assemble_ritz,
                        residual_norms, solve_projected)
from .recursion import (BiorthBasis, StepOutcome, StepStatus, init_pair,
                        step, tridiagonal_matrices)
from .variational import (RpaForm, energy_functional, from_thouless,
                          stationarity_residual, to_thouless)

__version__ = "0.1.0"

__all__ = [
    "BiorthBasis", "ConvergenceRecord", "DegeneratePair", "DenseSpectrum",
    "DimensionMismatch", "ExplicitOperator", "InvalidParameter",
    "InverseMassOperator", "MaxIterations", "ModeSet", "NonSquare", "NotSPD",
    "NotSymmetricHeader", "OscmodesError", "ParseError", "ProjectedPencil",
    "RitzPair", "RpaForm", "SingularFactor", "SizeGuard", "SolverConfig",
    "SparseSymMatrix", "StepOutcome", "StepStatus", "assemble_ritz",
    "cg_solve", "deflate", "dense_spectrum", "energy_functional",
    "from_thouless", "gen_random_spd", "generate_problem", "init_pair",
    "residual_norms", "solve_lowest", "solve_projected",
    "stationarity_residual", "step", "to_thouless", "tridiagonal_matrices",
]
