"""Exception hierarchy shared by the library and the CLI."""


class PlasmonKerrError(Exception):
    """Base class for all package errors."""


class ParameterError(PlasmonKerrError, ValueError):
    """Invalid physical parameter (negative rate, non-finite value, ...)."""


class DomainError(PlasmonKerrError, ValueError):
    """Input lies outside the domain where an operation is defined."""


class SingularityError(DomainError):
    """A susceptibility denominator vanishes."""

    def __init__(self, message, delta=None):
        super().__init__(message)
        self.delta = delta


class NonUniqueSteadyStateError(PlasmonKerrError):
    """The generator has more than one stationary direction."""


class DarkStateError(DomainError):
    """Driven steady state is the trapped level |1>, so the probe coherence vanishes."""


class FitError(PlasmonKerrError):
    """Amplitude-ladder fit is ill-conditioned."""


class IntegrationError(PlasmonKerrError):
    """Adaptive time integration failed (step-size underflow)."""
