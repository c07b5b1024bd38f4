"""Exception types shared across the package."""


class VarintError(Exception):
    """Base class for all varint errors."""


class ConfigurationError(VarintError, ValueError):
    """A parameter or configuration value is outside its supported range."""


class DimensionError(VarintError, ValueError):
    """Array arguments have inconsistent shapes or lengths."""


class BasisIndexError(VarintError, IndexError):
    """Polynomial degree index outside the basis range."""


class SingularityError(VarintError, ArithmeticError):
    """Evaluation requested too close to a singular point of a potential."""


class ConvergenceError(VarintError, RuntimeError):
    """An implicit stage solve did not reach the requested tolerance."""

    def __init__(self, message, residual_norm=None, iterations=None):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


class DivergenceError(VarintError, ArithmeticError):
    """A stage iteration produced non-finite values."""


class TransformError(VarintError, RuntimeError):
    """Momentum recovery through the velocity-momentum change of variables failed."""


class InternalConsistencyError(VarintError, RuntimeError):
    """A structural identity that must hold by construction was violated."""
