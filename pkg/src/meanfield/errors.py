"""Exception types shared across the toolkit."""


class MeanfieldError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatchError(MeanfieldError):
    """A point or ball does not match the ambient dimension."""


class DomainError(MeanfieldError):
    """Invalid domain description or discretization request."""


class FieldError(MeanfieldError):
    """Invalid field evaluation or an unavailable exact Laplacian."""


class QuadratureError(MeanfieldError):
    """Quadrature precondition breach (order too low, ball exits domain)."""


class ConvergenceError(MeanfieldError):
    """An iterative solver failed to reach its tolerance."""


class ConfigError(MeanfieldError):
    """Malformed or inconsistent run configuration."""
