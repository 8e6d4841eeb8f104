"""Exception types shared across the library."""


class WavetraceError(Exception):
    """Base class for all library errors."""


class DomainError(WavetraceError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class SmoothnessError(WavetraceError, ValueError):
    """A test function does not have enough derivatives for the request."""


class PrecisionError(WavetraceError, RuntimeError):
    """A series or quadrature could not reach the requested accuracy.

    The best available value is attached as ``partial_value``.
    """

    def __init__(self, message, partial_value=None):
        super().__init__(message)
        self.partial_value = partial_value


class DegenerateInputError(WavetraceError, ValueError):
    """Inputs are too close to a removable singularity of a closed form."""


class SamplingError(WavetraceError, RuntimeError):
    """Monte Carlo sampling produced too many non-finite samples."""


class QuadratureError(WavetraceError, RuntimeError):
    """Adaptive quadrature exhausted its refinement budget."""


class UnsupportedError(WavetraceError, ValueError):
    """The request is outside the implemented scope of this operation."""


class UsageError(WavetraceError, ValueError):
    """Malformed CLI arguments or configuration."""
