"""Exception hierarchy shared by the solvers, the certificate and the CLI."""


class TecellError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(TecellError, ValueError):
    pass


class DomainError(TecellError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class IncompleteModelError(TecellError):
    """A bound required by the certificate is missing from the material model."""


class IncompatibleDataError(TecellError):
    """Surface current violates the zero-net-current compatibility condition."""


class AssemblyError(TecellError):
    """The discrete system could not be assembled or factorized."""


class DivergenceError(TecellError):
    """A field became non-finite."""


class NonlinearDivergenceError(DivergenceError):
    """Newton iteration for the radiation term did not converge."""


class ConfigError(TecellError, ValueError):
    """Configuration file could not be parsed or failed schema validation."""
