"""Exception hierarchy shared by all modules."""


class DQMError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DQMError, ValueError):
    """Argument outside the domain of a function (poles, |q| >= 1, ...)."""


class PoleError(DomainError):
    """Evaluation exactly at a zero of a denominator."""


class StructureError(DQMError, ValueError):
    """Matrix does not have the structure an operation requires."""


class InterpolationError(DQMError, ValueError):
    """Degenerate abscissae or inconsistent over-determined data."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InconsistentSystemError(DQMError, ValueError):
    """Over-determined linear system without an exact solution."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularSystemError(DQMError, ValueError):
    """Linear system whose solution is not unique."""


class ValidationError(DQMError, ValueError):
    """Model or coefficient set violating its admissible range."""


class UnsupportedError(DQMError, ValueError):
    """Requested construction is outside what the package supports."""


class DiscrepancyWarning(UserWarning):
    """A printed reference value disagrees with the computed one."""
