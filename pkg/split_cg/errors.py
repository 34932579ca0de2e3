"""Exceptions raised by the split conditional gradient library."""


class SplitCGError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(SplitCGError, ValueError):
    """Shapes of points, blocks or sets do not agree."""


class WeightsError(SplitCGError, ValueError):
    """Convex weights are not positive or do not sum to one."""


class CapabilityError(SplitCGError, NotImplementedError):
    """A set or instance does not support the requested operation."""


class InfeasibleStartError(SplitCGError, ValueError):
    """The starting point is not blockwise feasible."""


class InstanceTooLargeError(SplitCGError, ValueError):
    """A brute-force oracle was asked to enumerate too many points."""


class ConfigError(SplitCGError, ValueError):
    """Problem configuration is malformed."""

    def __init__(self, message: str, path=None):
        self.path = path
        super().__init__(f'{path}: {message}' if path else message)


class SolverError(SplitCGError, RuntimeError):
    """The solver failed while iterating."""
