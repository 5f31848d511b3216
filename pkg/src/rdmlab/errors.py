"""Exception types raised across the package."""


class RdmLabError(Exception):
    """Base class for all rdmlab errors."""


class DimensionError(RdmLabError, ValueError):
    """Invalid matrix dimensions or distribution parameters."""


class DomainError(RdmLabError, ValueError):
    """Input outside a formula's domain (e.g. k < n without swapping, off-simplex vector)."""


class DegenerateError(RdmLabError, ValueError):
    """Probability-zero degenerate input, such as a zero-trace Wishart sample."""


class NonHermitianError(RdmLabError, ValueError):
    """Matrix fails the Hermitian tolerance required by an eigensolve."""


class NumericalError(RdmLabError, RuntimeError):
    """Eigensolver non-convergence, quadrature failure, or a violated numerical contract."""


class RangeError(RdmLabError, OverflowError):
    """Result exceeds the representable double range."""
