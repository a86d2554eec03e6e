"""Exception types shared across the package."""


class RingdampError(Exception):
    """Base class for all package-specific errors."""


class ParameterDomainError(RingdampError, ValueError):
    """An input lies outside its physical or geometric domain."""


class NumericalDomainError(RingdampError, ArithmeticError):
    """A numerical operation is ill-posed for the given values
    (singular inertia, degenerate linear solve, non-finite state)."""


class StiffnessError(NumericalDomainError):
    """Adaptive step-size control underflowed the configured minimum step."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial  # Trajectory covering [0, t_fail), when available


class ConfigError(RingdampError, ValueError):
    """A configuration document or override is malformed."""
