"""Exception hierarchy shared by all modules."""


class TwoCenterError(Exception):
    """Base class for every error raised by the package."""


class DomainError(TwoCenterError, ValueError):
    """An argument lies outside the domain where the quantity is real/finite."""


class SingularityError(TwoCenterError, ValueError):
    """Evaluation requested at (or with a stencil touching) a Coulomb center."""


class DegeneracyError(TwoCenterError, ValueError):
    """Metric data requested on the degenerate boundary u = 1 or |v| = 1."""


class NumericalError(TwoCenterError, RuntimeError):
    """An iterative routine failed to reach its tolerance.

    Attributes
    ----------
    diagnostics : dict
        Free-form information about the failure (evaluations, last error
        estimate, solver message, ...).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DivergenceError(NumericalError):
    """The integrand does not decay: the integral is infinite."""
