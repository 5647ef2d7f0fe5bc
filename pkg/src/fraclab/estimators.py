"""Scikit-learn style wrapper around the Schrodinger Dirichlet solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import ConfigurationError
from .grid import build_graded_grid, default_grading
from .operator import assemble_galerkin
from .schrodinger import Potential, solve

__all__ = ["FractionalDirichletSolver"]


class FractionalDirichletSolver(TransformerMixin, BaseEstimator):
    """Map right-hand sides sampled at grid nodes to solutions.

    Parameters
    ----------
    s : float
        Order of the fractional Laplacian, in (0, 1).
    N : int
        Number of interior nodes.
    q : float or None
        Grading exponent; ``None`` selects the default for ``s``.
    R : float
        Half-width of the interval ``(-R, R)``.
    potential : str
        Potential specification, e.g. ``"zero"`` or ``"power 1 1"``.
    tol : float
        Truncation tolerance of the Schrodinger iteration.

    Attributes
    ----------
    nodes_ : ndarray of shape (N,)
        Grid nodes; rows passed to :meth:`transform` are data at these nodes.
    operator_ : OperatorMatrix
        Assembled stiffness matrix.
    """

    def __init__(self, s=0.5, N=256, q=None, R=1.0, potential="zero", tol=1e-10):
        self.s = s
        self.N = N
        self.q = q
        self.R = R
        self.potential = potential
        self.tol = tol

    def fit(self, X=None, y=None):
        """Assemble the grid and operator; ``X``, if given, is only checked for width."""
        if not 0.0 < self.s < 1.0:
            raise ConfigurationError(f"s must lie in (0, 1), got {self.s}")
        q = default_grading(self.s) if self.q is None else self.q
        grid = build_graded_grid(self.R, int(self.N), q)
        self.potential_ = Potential.parse(self.potential)
        self.operator_ = assemble_galerkin(grid, self.s)
        self.nodes_ = grid.nodes.copy()
        self.n_features_in_ = grid.size
        if X is not None:
            self._check(X)
        return self

    def _check(self, X):
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != self.n_features_in_:
            raise ConfigurationError(f"expected {self.n_features_in_} columns (one per node), got {X.shape[1]}")
        return X

    def transform(self, X):
        """Solve once per row of ``X``; returns nodal solution values."""
        check_is_fitted(self, "operator_")
        X = self._check(X)
        return np.vstack([solve(self.potential_, row, self.operator_, tol=self.tol).u.values for row in X])
