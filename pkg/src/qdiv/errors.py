"""Exception hierarchy shared by all qdiv modules."""


class QdivError(Exception):
    """Base class for every error raised by qdiv."""


class ValidationError(QdivError, ValueError):
    """An input violates a documented invariant."""


class NonHermitian(ValidationError):
    pass


class NegativeSpectrum(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


class NotProjection(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class InvalidPovm(ValidationError):
    pass


class BadAlpha(ValidationError):
    pass


class BadU(ValidationError):
    pass


class BadKappa(ValidationError):
    pass


class BadIndex(ValidationError):
    pass


class SupportViolation(ValidationError):
    """``s(rho) <= s(sigma)`` is required but fails."""


class TooLarge(ValidationError):
    """The requested tensor power or type-class enumeration exceeds the memory guard."""


class ParseError(QdivError, ValueError):
    """An input file could not be parsed."""


class NumericalError(QdivError, ArithmeticError):
    """Base class for failures of numerical procedures on valid input."""


class InfiniteDivergence(NumericalError):
    """A quantity that must be finite evaluated to an infinite value."""


class NotConverged(NumericalError):
    """An iterative procedure stopped before meeting its tolerance.

    The best value found so far is kept on ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
