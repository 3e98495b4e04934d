"""Exception types shared across the package."""


class TrinionError(Exception):
    """Base class for validation failures raised by this package."""


class DomainError(TrinionError, ValueError):
    """Input lies outside the domain of a map (e.g. a singular denominator)."""


class OffSurfaceError(TrinionError, ValueError):
    """A character triple does not satisfy Lawton's cubic."""


class NotInFieldError(TrinionError, ValueError):
    """The requested object exists only over a field extension."""


class NotUnipotentError(TrinionError, ValueError):
    pass


class UnsupportedJordanTypeError(TrinionError, ValueError):
    pass


class ReducibleError(TrinionError, ValueError):
    pass


class DivisibilityError(TrinionError, ValueError):
    pass


class InvalidDomainError(TrinionError, ValueError):
    pass


class NonConvergenceError(TrinionError, RuntimeError):
    """Newton iteration did not reach the requested tolerance.

    The last iterate and its residual are attached so callers can report
    diagnostics.
    """

    def __init__(self, message, residual=None, iterate=None):
        super().__init__(message)
        self.residual = residual
        self.iterate = iterate
