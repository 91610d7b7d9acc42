"""Exception hierarchy shared across the package."""


class GraphCoalesceError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteWeight(GraphCoalesceError):
    pass


class AsymmetricDuplicate(GraphCoalesceError):
    pass


class IndexOutOfRange(GraphCoalesceError):
    pass


class DimensionMismatch(GraphCoalesceError):
    pass


class IsolatedNode(GraphCoalesceError):
    pass


class NonSymmetricInput(GraphCoalesceError):
    pass


class IndefiniteInput(GraphCoalesceError):
    pass


class ZeroMatrix(GraphCoalesceError):
    pass


class LengthMismatch(GraphCoalesceError):
    pass


class MaxIterExceeded(GraphCoalesceError):
    """Raised only where no sensible best-effort iterate exists.

    Iterative routines normally report non-convergence through a flag on
    their result instead of raising.
    """
