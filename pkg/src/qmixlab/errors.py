"""Exception types shared across the package."""


class QmixError(Exception):
    """Base class for all package errors."""


class QuadratureError(QmixError):
    """A requested tolerance could not be reached within the panel budget."""


class RegimeBoundaryError(QmixError, ValueError):
    """Arguments sit on a regime boundary where a formula is singular."""


class EnumerationError(QmixError):
    """A group-ball enumeration was too small to certify a result."""


class ReductionError(QmixError):
    """Dirichlet-domain reduction did not terminate."""


class SamplingError(QmixError):
    """Rejection sampling efficiency fell below the allowed floor."""


class SpectrumFormatError(QmixError, ValueError):
    """Malformed spectrum file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SpectrumValidationError(QmixError, ValueError):
    """Spectrum data violates an invariant (ordering, Hermitian symmetry)."""


class ConfigError(QmixError, ValueError):
    """Configuration text could not be parsed or validated."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if key is not None:
            prefix.append(f"key '{key}'")
        if prefix:
            message = ", ".join(prefix) + ": " + message
        super().__init__(message)
