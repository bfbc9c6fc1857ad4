"""Exception hierarchy shared across the package."""


class DualMpcError(Exception):
    """Base class for all errors raised by dualmpc."""


class DimensionError(DualMpcError, ValueError):
    pass


class NotSymmetricError(DualMpcError, ValueError):
    pass


class NotPositiveDefiniteError(DualMpcError, ValueError):
    """A matrix that must be positive definite is not.

    ``min_eig`` carries the offending smallest eigenvalue so callers can
    decide how to recover (e.g. shrink the exploration weight).
    """

    def __init__(self, message, min_eig=None):
        super().__init__(message)
        self.min_eig = min_eig


class DegenerateNoiseError(DualMpcError, ArithmeticError):
    """Innovation covariance is numerically singular."""


class SolverError(DualMpcError, RuntimeError):
    """The box QP solver failed to reach the requested KKT tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class EpisodeError(DualMpcError, RuntimeError):
    """A closed-loop episode aborted; ``step`` is the failing time index."""

    def __init__(self, message, step):
        super().__init__(f"step {step}: {message}")
        self.step = step


class ConfigError(DualMpcError, ValueError):
    """Invalid run configuration. ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
