"""Shared exception and warning types."""


class SimulationError(Exception):
    """Base class for errors raised by this package."""


class ConstraintError(SimulationError, ValueError):
    """A physical or layout constraint is violated."""


class ConfigurationError(SimulationError, ValueError):
    """A simulation setup is inconsistent or out of range."""


class SchedulingError(SimulationError, ValueError):
    """A switch schedule cannot be realized with the given timing."""


class DecodingError(SimulationError, RuntimeError):
    """Bit decoding failed (degenerate amplitude statistics)."""


class DesignMismatchWarning(UserWarning):
    """Operating point differs noticeably from the design point."""
