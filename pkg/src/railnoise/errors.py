"""Exception hierarchy shared by all railnoise modules."""


class RailNoiseError(Exception):
    """Base class for every error raised by railnoise."""


class DomainError(RailNoiseError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class UnsupportedConfigurationError(RailNoiseError, ValueError):
    """The requested model or approximation does not apply to this setup."""


class SolverError(RailNoiseError, ArithmeticError):
    """A numerical procedure (root bracketing, fitting) failed."""


class ResonanceSingularityError(SolverError):
    """The boundary system is singular: an undamped resonance was hit.

    ``frequency_hz`` carries the offending frequency.
    """

    def __init__(self, message, frequency_hz=None):
        super().__init__(message)
        self.frequency_hz = frequency_hz


class FitError(SolverError):
    """Degenerate design matrix in a least-squares fit."""


class SpectrumFormatError(RailNoiseError, ValueError):
    """A noise spectrum file or description is malformed."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigError(RailNoiseError, ValueError):
    """Configuration parsing or validation failure; ``path`` names the field."""

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path
