"""Exception types shared across the package."""


class FlatloError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(FlatloError, ValueError):
    """An operation was called with an out-of-range or malformed argument."""


class ValidationError(FlatloError, ValueError):
    """A squadron or run configuration failed validation."""


class ConfigurationError(FlatloError, ValueError):
    """A configuration is self-consistent but geometrically infeasible."""


class DegenerateSegmentError(ParameterError):
    """Two points expected to span a segment coincide."""


class IntegrationError(FlatloError, RuntimeError):
    """Numerical integration left the model's valid domain."""


class DivergenceError(FlatloError, RuntimeError):
    """A tracked aircraft drifted past the configured abort bound."""


class AlignmentError(FlatloError, ValueError):
    """Trajectories expected to share a time grid do not."""
