"""Exception hierarchy shared by every module of the package."""


class XXZError(Exception):
    """Base class for all errors raised by xxz_lab."""


class InvalidParameter(XXZError, ValueError):
    """A parameter is outside its admissible domain."""


class EmptyRegionError(InvalidParameter):
    """A dilated domain contains no lattice sites."""


class ConvergenceError(XXZError, RuntimeError):
    """An iterative eigensolver hit its iteration cap.

    ``residuals`` carries the last residual norms so callers can report them.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class CertificationError(XXZError):
    """R is too small for the error budget to give a usable interval."""
