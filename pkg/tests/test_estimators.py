import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fraclab import FractionalDirichletSolver
from fraclab.errors import ConfigurationError


def test_fit_transform_torsion():
    est = FractionalDirichletSolver(s=0.5, N=256, q=4.0)
    U = est.fit_transform(np.ones((1, 256)))
    exact = np.sqrt(1 - est.nodes_**2)
    inner = 1 - np.abs(est.nodes_) > 0.1
    assert np.max(np.abs(U[0, inner] / exact[inner] - 1)) < 0.02


def test_rows_independent_and_linear():
    est = FractionalDirichletSolver(N=64).fit()
    X = np.vstack([np.ones(64), 2 * np.ones(64)])
    U = est.transform(X)
    assert np.allclose(U[1], 2 * U[0])


def test_potential_lowers_solution():
    X = np.ones((1, 64))
    u0 = FractionalDirichletSolver(N=64).fit().transform(X)
    u1 = FractionalDirichletSolver(N=64, potential="bounded one").fit().transform(X)
    assert np.all(u1 <= u0)


def test_clone_and_params():
    est = FractionalDirichletSolver(s=0.3, potential="power 1 0.6")
    assert clone(est).get_params() == est.get_params()


def test_not_fitted():
    with pytest.raises(NotFittedError):
        FractionalDirichletSolver().transform(np.ones((1, 256)))


def test_width_checked():
    with pytest.raises(ConfigurationError):
        FractionalDirichletSolver(N=64).fit(np.ones((1, 10)))
    with pytest.raises(ConfigurationError):
        FractionalDirichletSolver(s=1.2).fit()
