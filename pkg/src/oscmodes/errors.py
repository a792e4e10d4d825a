"""Exception taxonomy shared by all oscmodes modules."""


class OscmodesError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(OscmodesError):
    """Vector or matrix dimensions do not conform."""


class NotSPD(OscmodesError):
    """A matrix required to be symmetric positive definite is not."""


class MaxIterations(OscmodesError):
    """An iteration budget was exhausted before convergence.

    When raised by the outer solver, ``modes`` carries the partial result
    (a ModeSet with whatever converged plus the full history).
    """

    def __init__(self, message, modes=None):
        super().__init__(message)
        self.modes = modes


class DegeneratePair(OscmodesError):
    """A (xi, eta) pair has (numerically) vanishing inner product."""


class SingularFactor(OscmodesError):
    """A triangular factor has a zero diagonal entry."""


class InvalidParameter(OscmodesError):
    """A configuration or generator parameter is out of range."""


class SizeGuard(OscmodesError):
    """A dense desk-scale operation was requested at too large a dimension."""


class ParseError(OscmodesError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotSymmetricHeader(ParseError):
    """Matrix Market header does not declare a symmetric matrix."""


class NonSquare(ParseError):
    """Matrix Market file declares a non-square matrix."""
