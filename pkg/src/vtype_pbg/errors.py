"""Exception hierarchy shared by the numerical and physics modules."""


class VTypeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(VTypeError, ValueError):
    """An argument violates a documented precondition."""


class SingularPointError(InvalidInputError):
    """Evaluation requested at a branch point or pole."""


class QuadratureError(VTypeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate is kept on ``result`` so callers can decide
    whether it is still usable.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SldInconsistencyError(VTypeError):
    """The SLD does not satisfy its defining equation on the support of rho."""


class SingularFisherError(VTypeError):
    """The quantum Fisher information matrix is not invertible."""


class IntegrationError(VTypeError):
    """A time-stepping integration lost norm or became unstable."""


class ConfigError(VTypeError):
    """A scenario configuration could not be parsed or validated."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
