"""Exception hierarchy shared by every module."""


class KljnError(Exception):
    """Base class for toolkit errors."""


class ValidationError(KljnError, ValueError):
    """Invalid parameter or precondition."""


class NumericalError(KljnError, RuntimeError):
    """A numeric routine failed to produce a trustworthy result."""


class SingularSystemError(NumericalError):
    pass


class IntegrationError(NumericalError):
    """Transient integration became unstable or lost energy balance."""


class QuadratureError(NumericalError):
    pass


class UnmeasurableError(NumericalError):
    """Quantity is below the numeric resolution of the estimator."""
