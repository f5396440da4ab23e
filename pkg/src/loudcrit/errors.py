"""Exception hierarchy shared by all modules."""


class LoudError(Exception):
    """Base class for every numerical failure raised by the package."""


class DomainError(LoudError, ValueError):
    pass


class PoleError(DomainError):
    """F hits a pole of the first-integral coefficients (F in {0, 1/2, 1})."""


class ComplexRootsError(LoudError):
    pass


class ConvergenceError(LoudError):
    pass


class RootError(ConvergenceError):
    pass


class SingularityError(LoudError):
    pass


class DerivativeUnavailable(LoudError):
    pass


class QuadratureError(LoudError):
    pass


class DivergenceError(QuadratureError):
    pass


class FitError(LoudError):
    pass


class DegenerateNu(LoudError):
    pass


class TieDegeneracyError(LoudError):
    pass


class NoBracketError(LoudError):
    pass


class ExtrapolationError(LoudError):
    pass
