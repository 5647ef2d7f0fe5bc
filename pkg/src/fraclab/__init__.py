"""Restricted fractional Laplacian and fractional Schrodinger Dirichlet solvers."""

from .errors import ConfigurationError, IterationError, MatrixInvariantError, PreconditionError
from .special import *  # noqa: F401,F403
from .grid import *  # noqa: F401,F403
from .operator import *  # noqa: F401,F403
from .greens import *  # noqa: F401,F403
from .schrodinger import *  # noqa: F401,F403
from .flatness import *  # noqa: F401,F403
from .well import *  # noqa: F401,F403
from .experiments import ExperimentResult, experiment_names, run_experiment
from . import special, grid, operator, greens, schrodinger, flatness, well, experiments

__version__ = "0.1.0"

__all__ = (
    ["ConfigurationError", "IterationError", "MatrixInvariantError", "PreconditionError",
     "ExperimentResult", "experiment_names", "run_experiment", "FractionalDirichletSolver"]
    + special.__all__ + grid.__all__ + operator.__all__ + greens.__all__
    + schrodinger.__all__ + flatness.__all__ + well.__all__
)


def __getattr__(name):
    # scikit-learn is only imported when the estimator is requested
    if name == "FractionalDirichletSolver":
        from .estimators import FractionalDirichletSolver
        return FractionalDirichletSolver
    raise AttributeError(f"module 'fraclab' has no attribute {name!r}")
