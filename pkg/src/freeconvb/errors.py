"""Exception hierarchy shared by every module of the package."""


class FreeConvError(Exception):
    """Base class for all errors raised by :mod:`freeconvb`."""


class DomainError(FreeConvError, ValueError):
    """A function was evaluated outside the region where it is defined."""


class NonInvertible(FreeConvError, ZeroDivisionError):
    """A dual number with vanishing first coordinate was inverted."""


class CriticalPoint(FreeConvError, ZeroDivisionError):
    """An inverse-function step hit a vanishing derivative."""


class DegenerateValue(FreeConvError, ZeroDivisionError):
    """A transform took a value (usually zero) that cannot be reciprocated."""


class SizeLimit(FreeConvError, ValueError):
    """A requested enumeration or basis exceeds the supported size."""


class InvalidBlock(FreeConvError, ValueError):
    """A block passed to a pairing construction is not a block of the base."""


class UnsupportedRepr(FreeConvError, TypeError):
    """An operation is not available for the given representation."""


class NonCentered(FreeConvError, ValueError):
    """A measure expected to have zero mean does not."""


class InfiniteVariance(FreeConvError, ValueError):
    """A measure expected to have a finite second moment does not."""


class InvalidSpec(FreeConvError, ValueError):
    """Stable-law parameters violate the constraints of their case."""


class TruncationTooShallow(FreeConvError, ValueError):
    """A truncated Fock space is too shallow for the requested moment."""


class DegenerateMeasure(FreeConvError, ValueError):
    """A measure is degenerate for multiplicative subordination."""


class NoConvergence(FreeConvError, ArithmeticError):
    """An iterative solver stopped before reaching its tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    residual : float, optional
        The last residual observed by the solver.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
