import numpy as np
import pytest

from fraclab.errors import ConfigurationError, PreconditionError
from fraclab.grid import BallDomain, GridFunction, Weight, build_graded_grid, weighted_norm
from fraclab.greens import (RadialProfile, cell_averages, comparison_kernel, green_matrix, green_solve,
                            hopf_kernel_constant, phi_delta, torsion_function, verify_kernel_bounds)
from fraclab.operator import solve_dirichlet
from fraclab.special import green_kernel_1d, torsion_constant

from conftest import operator


def test_zero_data():
    g = build_graded_grid(1.0, 64, 4.0)
    assert np.all(green_solve(GridFunction(g, np.zeros(g.size)), 0.5).values == 0.0)


def test_torsion_half_interior_error():
    g = build_graded_grid(1.0, 2048, 4.0)
    u = green_solve(GridFunction(g, np.ones(g.size)), 0.5).values
    exact = cell_averages(g, lambda x, d: np.sqrt(d * (2 - d)))
    inner = g.gaps >= 0.05
    assert np.max(np.abs(u[inner] / exact[inner] - 1)) <= 0.005


def test_callable_data_needs_grid():
    with pytest.raises(ConfigurationError):
        green_solve(lambda x, d: np.ones_like(x), 0.5)


def test_nonintegrable_callable_rejected():
    g = build_graded_grid(1.0, 64, 4.0)
    with pytest.raises(PreconditionError):
        green_solve(lambda x, d: d**-2.0, 0.5, grid=g)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_agrees_with_galerkin_in_l1(s):
    A = operator(s, 512)
    g = A.grid
    f = lambda x, d: np.cos(3 * x) + 0.5
    ug = green_solve(f, s, grid=g).values
    ua = solve_dirichlet(A, f(g.nodes, g.gaps)).values
    diff = weighted_norm(ug - ua, Weight(), 1, g) / weighted_norm(ua, Weight(), 1, g)
    assert diff <= 0.01


def test_torsion_function_half():
    t = torsion_function(BallDomain(1, 1.0), 0.5, 1023)
    mid = t.values[t.grid.size // 2]
    assert mid == pytest.approx(1.0, rel=1e-3)
    assert t.values.min() > 0
    assert t.meta["upper_constant"] / t.meta["lower_constant"] < 10
    assert t.meta["closed_form_constant"] == 1.0


def test_radial_torsion_three_dimensions():
    s, R = 0.5, 1.0
    dom = BallDomain(3, R)
    r = np.linspace(0, 0.95, 40)
    u = green_solve(RadialProfile(dom, r, np.ones_like(r)), s)
    exact = torsion_constant(3, s, R) * (R * R - r * r) ** s
    assert np.max(np.abs(u.values[:30] / exact[:30] - 1)) < 0.02


def test_phi_delta_nondecreasing_in_truncation():
    dom = BallDomain(1, 1.0)
    vals = [phi_delta(dom, 0.5, 256, k).values for k in (1.0, 10.0, 100.0, None)]
    for a, b in zip(vals, vals[1:]):
        assert np.all(b >= a - 1e-13 * np.abs(b).max())


def test_green_matrix_symmetric_positive():
    g = build_graded_grid(1.0, 64, 4.0)
    W = green_matrix(g, 0.5)
    assert np.allclose(W, W.T, rtol=0, atol=1e-14 * np.abs(W).max())
    assert W.min() > 0


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_kernel_bounds_finite_and_banded(s):
    rep = verify_kernel_bounds(BallDomain(1, 1.0), s, 3000, seed=1)
    assert np.isfinite(rep.lower) and np.isfinite(rep.upper) and rep.lower > 0
    assert rep.spread < 100


def test_kernel_bounds_deterministic_in_seed():
    a = verify_kernel_bounds(BallDomain(1, 1.0), 0.3, 600, seed=5)
    b = verify_kernel_bounds(BallDomain(1, 1.0), 0.3, 600, seed=5)
    assert (a.lower, a.upper) == (b.lower, b.upper)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_kernel_ratio_stays_banded_toward_boundary(s):
    # delta(x) -> 0 with y fixed, and |x - y| -> 0 at fixed delta
    dy = np.full(8, 0.6)
    dx = 10.0 ** -np.arange(1, 9, dtype=float)
    dist = 1.0 - dx - (1.0 - dy)
    r1 = green_kernel_1d(s, 1.0, dx, dy, dist) / comparison_kernel(1, s, dx, dy, dist)
    h = 10.0 ** -np.arange(1, 9, dtype=float)
    dd = np.full(8, 0.5)
    r2 = green_kernel_1d(s, 1.0, dd, dd - h, h) / comparison_kernel(1, s, dd, dd - h, h)
    r = np.concatenate([r1, r2])
    assert r.max() / r.min() < 100


def test_kernel_bounds_need_samples():
    with pytest.raises(ConfigurationError):
        verify_kernel_bounds(BallDomain(1, 1.0), 0.5, 10)


def test_hopf_kernel_constant_positive():
    assert hopf_kernel_constant(BallDomain(1, 1.0), 0.5, 600, seed=0) > 0


def test_data_norm_continuity_constant_stable():
    consts = []
    for N in (128, 256, 512):
        g = build_graded_grid(1.0, N, 4.0)
        f = lambda x, d: d**-0.9
        u = green_solve(f, 0.5, grid=g)
        data = weighted_norm(cell_averages(g, f), Weight.delta_s(0.5), 1, g)
        consts.append(weighted_norm(u, Weight(), 1) / data)
    assert max(consts) / min(consts) < 1.05
