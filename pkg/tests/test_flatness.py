
import numpy as np
import pytest

from fraclab.errors import ConfigurationError, PreconditionError
from fraclab.flatness import (barrier_bound, blowup_experiment, fit_boundary_exponent, grid_reaching, hopf_constant,
                              large_solution_residual, power_log_integrable, shell_integrals, torsion_residual,
                              trace_equivalence_experiment, verify_flatness)
from fraclab.operator import solve_dirichlet
from fraclab.schrodinger import Potential, solve
from fraclab.special import gamma_beta

from conftest import operator

# -- Hopf -----------------------------------------------------------------------


def test_hopf_constant_torsion_data_stable():
    consts = []
    for N in (256, 512, 1024):
        A = operator(0.5, N)
        f = np.ones(A.size)
        consts.append(hopf_constant(solve_dirichlet(A, f), f))
    assert min(consts) > 0 and max(consts) / min(consts) < 2


def test_hopf_left_half_data_reaches_right_half():
    A = operator(0.5, 512)
    f = (A.grid.nodes < 0).astype(float)
    u = solve_dirichlet(A, f)
    right = A.grid.nodes > 0
    r = u.values[right] / A.grid.gaps[right] ** 0.5
    assert r.min() > 0
    assert hopf_constant(u, f) > 0


@pytest.mark.parametrize("f", [np.zeros(128), -np.ones(128)])
def test_hopf_rejects_non_positive_data(f):
    A = operator(0.5, 128)
    with pytest.raises(PreconditionError):
        hopf_constant(solve_dirichlet(A, f), f)


# -- integrability classifiers --------------------------------------------------


@pytest.mark.parametrize("alpha, beta, expected", [(0.5, 0, True), (1.0, 2.0, True), (1.0, 1.0, False),
                                                   (1.0, 0.5, False), (1.2, 5.0, False)])
def test_power_log_integrable(alpha, beta, expected):
    assert power_log_integrable(alpha, beta) is expected


def test_borderline_data_classified_admissible():
    # f = delta^-1 |log delta|^-2: f delta^s = delta^(s-1) (...)^-2 is integrable for s > 0
    s = 0.5
    assert power_log_integrable(1.0 - s, 2.0)


def test_shell_integrals_match_closed_form():
    sh = shell_integrals(lambda t: t**-0.5, 1.0, 10)
    j = np.arange(10)
    exact = 2 * (2.0**(-0.5 * j) - 2.0**(-0.5 * (j + 1)))
    assert np.allclose(sh, exact, rtol=1e-12)


def test_grid_reaching_hits_target():
    g = grid_reaching(1.0, 256, 1e-10)
    assert g.gaps.min() == pytest.approx(1e-10, rel=1e-10)


# -- blow-up and trace criterion ------------------------------------------------


def test_blowup_small_grid():
    rep = blowup_experiment(lambda d: d**-1.5, 0.5, (10.0, 100.0, 1000.0), N=512,
                            admissible=power_log_integrable(1.0, 0.0))
    assert rep.blows_up and not rep.admissible
    assert all(r >= 1.2 for r in rep.ratios)


def test_blowup_control_converges():
    rep = blowup_experiment(lambda d: d**-0.25, 0.5, (10.0, 100.0, 1000.0), N=512)
    assert rep.converges


@pytest.mark.parametrize("b, finite", [(3.0, True), (2.0, False)])
def test_trace_criterion_small(b, finite):
    v = trace_equivalence_experiment(1.5, b, 0.5, N=512)
    assert v.classifier_finite is finite
    assert v.agrees


# -- barrier --------------------------------------------------------------------


def test_barrier_bound_closed_form():
    g = gamma_beta(1, 0.5, 0.75)
    assert barrier_bound(0.5, 0.25, 2 * abs(g), 1.0, 1.0) == pytest.approx(1 / abs(g), rel=1e-14)


def test_barrier_bound_decreases_with_confinement():
    vals = [barrier_bound(0.5, 0.25, c, 1.0, 2.0) for c in (5.0, 50.0, 500.0, 5e6)]
    assert all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < 1e-6


def test_barrier_bound_small_eps_limit():
    s, C_V = 0.5, 3.0
    ref = 2.0**s / (gamma_beta(1, s, s) + C_V)
    assert barrier_bound(s, 1e-9, C_V, 1.0, 2.0) == pytest.approx(ref, rel=1e-6)


def test_barrier_bound_preconditions():
    g = gamma_beta(1, 0.5, 0.75)
    with pytest.raises(PreconditionError):
        barrier_bound(0.5, 0.25, abs(g) * 0.99, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        barrier_bound(0.5, 0.6, 10.0, 1.0, 1.0)


def test_control_exponent_is_s():
    A = operator(0.5, 1024)
    fit = fit_boundary_exponent(solve_dirichlet(A, np.ones(A.size)))
    assert fit.exponent == pytest.approx(0.5, abs=0.05)


def test_flatness_small_grid():
    s, eps = 0.5, 0.25
    A = operator(s, 1024)
    V = Potential.power(2 * abs(gamma_beta(1, s, s + eps)), 2 * s)
    f = np.ones(A.size)
    rep = solve(V, f, A)
    fr = verify_flatness(V, f, eps, rep)
    assert fr.within_bound
    assert fr.fit.exponent >= s + eps / 2
    # u / delta^s tends to zero at the boundary-nearest nodes
    flat = rep.u.values / A.grid.gaps**s
    assert max(fr.near_boundary_ratios) < 0.05 * flat.max()


def test_flatness_requires_exponent_2s():
    A = operator(0.5, 128)
    V = Potential.power(1.0, 0.5)
    rep = solve(V, np.ones(A.size), A)
    with pytest.raises(ConfigurationError):
        verify_flatness(V, np.ones(A.size), 0.25, rep)


# -- large solutions ------------------------------------------------------------


@pytest.mark.parametrize("s, x", [(0.5, 0.0), (0.75, 0.3)])
def test_large_solution_is_s_harmonic(s, x):
    assert large_solution_residual(s, [x]) <= 1e-4


def test_torsion_distinguishes():
    v = torsion_residual(0.5, [0.0, 0.5])
    assert np.allclose(v, 1.0, rtol=1e-6)


def test_large_solution_points_need_interior():
    with pytest.raises(PreconditionError):
        large_solution_residual(0.5, [0.95])
