"""Exception taxonomy shared across the package."""


class NlsgroundError(Exception):
    """Base class for all package errors."""


class DomainError(NlsgroundError, ValueError):
    """Invalid argument: bad dimension, grid size, dilation factor, ..."""


class ZeroFunctionError(DomainError):
    """An operation that requires u != 0 received the zero function."""


class NotInLambdaError(NlsgroundError):
    """Fiber projection requested for a function outside the admissible set."""


class NoSignChangeError(NlsgroundError):
    """The Pohozaev fiber value has no sign change on the search bracket."""


class MultipleSignChangesError(NlsgroundError):
    """More than one sign change on the bracket; refuses to pick one.

    Uniqueness of the fiber root is expected for admissible potentials;
    multiple discrete crossings signal a discretization artifact and the
    caller should refine rather than trust any single root.
    """


class ConvergenceError(NlsgroundError):
    """An iterative solve hit its iteration cap or stalled out of tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class LeftLambdaError(ConvergenceError):
    """A descent step exited the admissible set and rescue rescaling failed."""


class ConstraintInfeasibleError(NlsgroundError):
    """No sampled profile reaches the minimization constraint (F3 failure)."""


class BracketNotFoundError(NlsgroundError):
    """Shooting could not bracket the separatrix amplitude."""


class StiffIntegrationError(NlsgroundError):
    """The ODE integration produced non-finite values."""


class PositivityBallError(NlsgroundError):
    """No sampled ball has V_inf - V > 0 together with a nonvanishing profile."""


class PreconditionError(NlsgroundError):
    """A verification suite was invoked on a context failing its hypotheses."""


class ConfigError(NlsgroundError):
    """Malformed or inconsistent run configuration."""
