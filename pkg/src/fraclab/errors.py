"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters or configuration."""


class PreconditionError(ValueError):
    """Input data outside the admissible class of an operation."""


class MatrixInvariantError(RuntimeError):
    """A discrete operator lost symmetry, definiteness or its sign pattern."""


class IterationError(RuntimeError):
    """An iteration hit its cap before converging."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
