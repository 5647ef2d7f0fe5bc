import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from fraclab.grid import GridFunction, build_graded_grid
from fraclab.operator import (apply_pointwise, assemble_galerkin, eigenpair, eilertsen_residual, eilertsen_terms,
                              pointwise_laplacian, read_matrix, solve_dirichlet, write_matrix)
from fraclab.special import gamma_beta, torsion_constant

from conftest import operator
from oracles import LAMBDA1_HALF


# -- pointwise principal value ------------------------------------------------


@pytest.mark.parametrize("x", [0.0, 0.7, -3.0])
def test_constants_are_s_harmonic(x):
    r = pointwise_laplacian(lambda y: 1.0, 0.4, x, breakpoints=(), tail_power=0.0)
    assert abs(r.value) <= 1e-12


@pytest.mark.parametrize("x", [0.0, 0.4, -0.8, 0.95])
def test_torsion_profile_half(x):
    val = apply_pointwise(lambda y: math.sqrt(max(1 - y * y, 0.0)), 0.5, x, support=(-1.0, 1.0))
    assert val == pytest.approx(1.0, rel=1e-7)


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_torsion_profile_general(s):
    C = torsion_constant(1, s)
    val = apply_pointwise(lambda y: C * max(1 - y * y, 0.0) ** s, s, 0.3, support=(-1.0, 1.0))
    assert val == pytest.approx(1.0, rel=1e-6)


def test_power_profile_at_two():
    r = pointwise_laplacian(lambda y: abs(y) ** 0.6, 0.5, 2.0, breakpoints=(0.0,), tail_power=0.6)
    assert r.value == pytest.approx(gamma_beta(1, 0.5, 0.6) * 2.0**-0.4, rel=1e-6)
    assert r.error < 1e-6 * r.scale


def test_quadratic_approaches_classical_limit():
    # (-Delta)^s of x^2 e^{-x^2}-type bump at 0 tends to -u''(0) = -2 as s -> 1
    u = lambda y: y * y * math.exp(-y * y)
    vals = [pointwise_laplacian(u, s, 0.0, breakpoints=(), support=(-40.0, 40.0)).value for s in (0.9, 0.99)]
    assert abs(vals[1] + 2.0) < abs(vals[0] + 2.0) < 1.0


def test_irregular_point_gets_warning_not_failure():
    r = pointwise_laplacian(lambda y: max(1 - y * y, 0.0) ** 0.1, 0.75, 0.999999, support=(-1.0, 1.0))
    assert math.isfinite(r.value) and r.warning is not None


# -- Eilertsen ------------------------------------------------------------------

gauss = lambda y: math.exp(-y * y)
shifted = lambda y: math.exp(-(y - 0.5) ** 2)


def test_eilertsen_with_constant_factor():
    r = eilertsen_residual(gauss, lambda y: 1.0, 0.5, 0.2, breakpoints=(), support=(-40.0, 40.0))
    assert abs(r) <= 1e-10


@pytest.mark.parametrize("u, v, x", [(gauss, gauss, 0.0), (gauss, shifted, 0.3)])
def test_eilertsen_gaussians(u, v, x):
    t = eilertsen_terms(u, v, 0.5, x, breakpoints=(), support=(-40.0, 40.0))
    assert abs(t["residual"]) <= 1e-6 * t["scale"]


# -- Galerkin matrix ------------------------------------------------------------


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_matrix_invariants(s):
    A = operator(s, 128)
    E = A.entries
    assert np.max(np.abs(E - E.T)) <= 1e-12 * np.abs(E).max()
    assert np.linalg.eigvalsh(E).min() > 0
    off_pos, row_neg = A.sign_defects()
    assert off_pos == 0.0 and row_neg == 0.0


def test_sign_correction_is_small():
    raw = assemble_galerkin(build_graded_grid(1.0, 128, 4.0), 0.5, enforce_sign=False)
    assert raw.sign_correction <= 1e-8


def test_near_classical_limit_stencil_pattern():
    A = assemble_galerkin(build_graded_grid(1.0, 32, 1.0), 0.98)
    E = A.entries / A.entries[16, 16]
    assert E[16, 15] < 0 and E[16, 17] < 0
    assert abs(E[16, 18]) < 0.05 * abs(E[16, 17])


@pytest.mark.parametrize("s", [0.5, 0.25])
def test_energy_identity(s):
    A = operator(s, 1024)
    g = A.grid
    C = torsion_constant(1, s)
    v = C * (g.gaps * (2 - g.gaps)) ** s
    # (-Delta)^s v = 1, so the energy equals int v = C int (1 - x^2)^s
    exact = C * integrate.quad(lambda x: (1 - x * x) ** s, -1, 1)[0]
    assert A.energy(v) == pytest.approx(exact, rel=0.02)


def test_zero_data_gives_zero_solution(small_operator):
    u = solve_dirichlet(small_operator, np.zeros(small_operator.size))
    assert np.all(u.values == 0.0)


@given(st.lists(st.floats(min_value=0.0, max_value=1e3), min_size=64, max_size=64))
def test_nonnegative_data_nonnegative_solution(f):
    A = operator(0.5, 64)
    f = np.array(f)
    u = solve_dirichlet(A, f).values
    assert u.min() >= -1e-12 * max(np.abs(f).max(), 1e-300)


def test_solve_rejects_wrong_shape(small_operator):
    with pytest.raises(ValueError):
        solve_dirichlet(small_operator, np.ones(3))


def test_torsion_discrete_half():
    A = operator(0.5, 1024, 4.0)
    u = solve_dirichlet(A, np.ones(A.size)).values
    g = A.grid
    exact = np.sqrt(g.gaps * (2 - g.gaps))
    inner = g.gaps >= 0.05
    assert np.max(np.abs(u[inner] / exact[inner] - 1)) <= 0.01


def test_boundary_profile_total_variation_bounded():
    tv = []
    for N in (128, 256, 512):
        A = operator(0.5, N)
        u = solve_dirichlet(A, np.ones(A.size)).values
        r = u / A.grid.gaps**0.5
        tv.append(np.abs(np.diff(r)).sum())
    assert max(tv) / min(tv) < 1.2


def test_first_eigenpair():
    A = operator(0.5, 512)
    e = eigenpair(A)
    assert e.lambda1 == pytest.approx(LAMBDA1_HALF, rel=2e-5)
    phi = e.phi1.values
    assert phi.min() > 0
    assert float(phi @ (A.mass * phi)) == pytest.approx(1.0, rel=1e-12)
    ratio = phi / A.grid.gaps**0.5
    assert ratio.max() / ratio.min() < 3


def test_matrix_dump_round_trip(tmp_path):
    A = operator(0.5, 64)
    path = tmp_path / "A.bin"
    write_matrix(A, path)
    E, s, R = read_matrix(path)
    assert np.array_equal(E, A.entries) and s == 0.5 and R == 1.0
    assert path.stat().st_size == 32 + 8 * 64 * 64


def test_matrix_dump_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"nonsense" * 8)
    with pytest.raises(ValueError):
        read_matrix(path)


def test_grid_function_data_accepted(small_operator):
    g = small_operator.grid
    u1 = solve_dirichlet(small_operator, GridFunction(g, np.ones(g.size))).values
    u2 = solve_dirichlet(small_operator, np.ones(g.size)).values
    assert np.array_equal(u1, u2)
