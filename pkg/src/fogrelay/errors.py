"""Exception hierarchy shared by the numerical modules and the CLI."""


class FogRelayError(Exception):
    """Base class for all package errors."""


class DomainError(FogRelayError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class PoleError(DomainError):
    """A hypergeometric parameter sits on a pole (non-positive integer b)."""


class SingularityError(DomainError):
    """A moment generating function was evaluated outside its strip."""


class DegenerateParameterError(DomainError):
    """Channel constants are undefined (e.g. m = z - phi**2 vanishes)."""


class ConvergenceError(FogRelayError, ArithmeticError):
    """A series, continued fraction or quadrature failed to converge."""


class NotConvergedError(ConvergenceError):
    """Adaptive quadrature exhausted its subdivision budget."""


class NanIntegrandError(ConvergenceError):
    """The integrand returned a non-finite value."""

    def __init__(self, point, value):
        super().__init__(f"integrand returned {value!r} at x={point!r}")
        self.point = point
        self.value = value


class TermError(ConvergenceError):
    """A closed-form term group failed; ``term`` names the offending group."""

    def __init__(self, term, cause):
        super().__init__(f"term {term}: {cause}")
        self.term = term
        self.cause = cause


class ConfigError(FogRelayError, ValueError):
    """A scenario configuration is invalid; ``path`` locates the field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
