import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclab.errors import ConfigurationError, PreconditionError
from fraclab.grid import Weight, weighted_norm
from fraclab.operator import solve_dirichlet
from fraclab.schrodinger import (BOUNDED_EXPRESSIONS, Potential, Spike, build_battery, counterexample_experiment,
                                 galerkin_phi_delta, kato_margin, kato_margins, resolvent_contraction_margin,
                                 resolvent_margins, solve, solve_truncated, stroock_varopoulos_margin,
                                 very_weak_residual)
from fraclab.special import gamma_beta

from conftest import operator

# -- potentials -----------------------------------------------------------------


@pytest.mark.parametrize("spec", ["power 1.0 1.0", "poschl 1.0 1.0 2.0 2.0", "bounded cosine", "well bounded one",
                                  "zero"])
def test_potential_spec_round_trip(spec):
    V = Potential.parse(spec)
    assert Potential.parse(V.describe()).describe() == V.describe()


@pytest.mark.parametrize("spec", ["", "power 1", "power a b", "bounded nothing", "banana 1", "power -1 1"])
def test_bad_potential_specs(spec):
    with pytest.raises(ConfigurationError):
        Potential.parse(spec)


def test_power_potential_uses_exact_gaps():
    V = Potential.power(2.0, 1.0)
    assert float(V.evaluate(np.array([1.0]), np.array([1e-30]))[0]) == pytest.approx(2e30)


def test_negative_potential_rejected():
    V = Potential.bounded(lambda x, d, R: x)
    with pytest.raises(PreconditionError):
        V.evaluate(np.array([-0.5, 0.5]), np.array([0.5, 0.5]))


def test_bounded_expressions_nonnegative():
    x = np.linspace(-0.99, 0.99, 50)
    for name in BOUNDED_EXPRESSIONS:
        assert np.all(Potential.bounded(name).evaluate(x, 1 - np.abs(x)) >= 0)


# -- truncation scheme ----------------------------------------------------------


def test_zero_data_any_potential():
    A = operator(0.5, 128)
    for V in (Potential.zero(), Potential.power(1.0, 1.0), Potential.bounded("cosine")):
        rep = solve(V, np.zeros(A.size), A)
        assert np.all(rep.u.values == 0.0)


@given(st.floats(min_value=1.0, max_value=1e3), st.floats(min_value=1.0, max_value=20.0))
def test_monotone_in_k(k1, factor):
    A = operator(0.5, 64)
    V = Potential.power(1.0, 1.0)
    f = np.exp(-4 * A.grid.nodes**2)
    u1 = solve_truncated(V, f, k1, 10.0, A).values
    u2 = solve_truncated(V, f, k1 * factor, 10.0, A).values
    assert np.all(u2 <= u1 + 1e-10 * np.abs(u1).max())
    assert u2.min() >= 0


@given(st.floats(min_value=1.0, max_value=1e3), st.floats(min_value=1.0, max_value=20.0))
def test_monotone_in_m(m1, factor):
    A = operator(0.5, 64)
    V = Potential.power(1.0, 1.0)
    f = A.grid.gaps**-0.7
    u1 = solve_truncated(V, f, 50.0, m1, A).values
    u2 = solve_truncated(V, f, 50.0, m1 * factor, A).values
    assert np.all(u1 <= u2 + 1e-10 * np.abs(u2).max())


def test_bounded_potential_phi_delta_constant_at_most_one():
    A = operator(0.5, 512)
    rep = solve(Potential.bounded("cosine"), np.ones(A.size), A)
    assert rep.flags["converged"]
    assert rep.constants["u_over_delta_s"] <= 1.0 + 1e-8
    assert rep.constants["V_u_phi_delta"] <= 1.0 + 1e-8


def test_zero_potential_phi_delta_identity_exact():
    A = operator(0.5, 256)
    rep = solve(Potential.zero(), np.cos(A.grid.nodes) + 1, A)
    assert rep.constants["u_over_delta_s"] == pytest.approx(1.0, rel=1e-10)


def test_super_singular_potential_flags():
    s, eps = 0.5, 0.25
    A = operator(s, 512)
    V = Potential.power(2 * abs(gamma_beta(1, s, s + eps)), 2 * s)
    rep = solve(V, np.ones(A.size), A)
    assert rep.flags["converged"] and rep.flags["u_over_delta_finite"]


def test_truncation_history_ends_untruncated():
    A = operator(0.5, 128)
    rep = solve(Potential.power(1.0, 1.0), np.ones(A.size), A)
    k, m = rep.truncation_history[-1][:2]
    assert math.isinf(k) and math.isinf(m)


def test_split_and_direct_signed_solves_agree():
    A = operator(0.5, 256)
    f = np.sin(3 * A.grid.nodes)
    V = Potential.power(1.0, 1.0)
    a = solve(V, f, A).u.values
    b = solve(V, f, A, signed="direct").u.values
    g = A.grid
    assert weighted_norm(a - b, Weight(), 1, g) <= 1e-10 * weighted_norm(a, Weight(), 1, g)


def test_repeated_solves_identical():
    A = operator(0.5, 256)
    f = np.sign(A.grid.nodes) + 0.3
    V = Potential.bounded("bump")
    assert np.array_equal(solve(V, f, A).u.values, solve(V, f, A).u.values)


def test_galerkin_phi_delta_positive():
    A = operator(0.25, 128)
    assert galerkin_phi_delta(A).min() > 0


# -- very weak formulation ------------------------------------------------------


def test_very_weak_residual_zero_potential_green_battery():
    A = operator(0.5, 2048)
    bat = build_battery(A, ["one", "x", "x2"], method="green")
    f = np.ones(A.size)
    rep = solve(Potential.zero(), f, A)
    assert very_weak_residual(rep, Potential.zero(), f, bat) <= 1e-6
    # the Galerkin battery satisfies the identity to rounding
    bat_g = build_battery(A, ["one", "x", "x2"])
    assert very_weak_residual(rep, Potential.zero(), f, bat_g) <= 1e-10


def test_very_weak_residual_singular_potential():
    vals = []
    for N in (256, 512):
        A = operator(0.5, N)
        V = Potential.power(1.0, 0.5)
        f = np.ones(A.size)
        rep = solve(V, f, A)
        vals.append(very_weak_residual(rep, V, f, build_battery(A)))
    assert max(vals) <= 1e-8


def test_battery_rejects_unknown_method(small_operator):
    with pytest.raises(ConfigurationError):
        build_battery(small_operator, method="magic")


# -- Kato, accretivity, Stroock-Varopoulos --------------------------------------


def test_kato_sign_changing_x():
    A = operator(0.5, 512)
    bat = build_battery(A)
    g = A.grid.nodes
    u = solve_dirichlet(A, g)
    m = kato_margins(u, g, bat)
    assert min(m["plain"], m["plus"]) >= -1e-8 * m["scale"]
    assert kato_margin(u, g, bat) == min(m["plain"], m["plus"])


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_kato_random_data(seed):
    A = operator(0.5, 64)
    bat = build_battery(A)
    g = np.random.default_rng(seed).standard_normal(A.size)
    m = kato_margins(solve_dirichlet(A, g), g, bat)
    assert min(m["plain"], m["plus"]) >= -1e-8 * m["scale"]


def test_resolvent_equal_data_zero_margin():
    A = operator(0.5, 64)
    f = np.ones(A.size)
    m = resolvent_margins(1.0, f, f, Potential.bounded("one"), "one", A)
    assert m["plain"] == 0.0 and m["plus"] == 0.0


@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([0.1, 1.0, 10.0]),
       st.sampled_from(["one", "phi_1"]))
def test_resolvent_contraction_random(seed, lam, weight):
    A = operator(0.5, 64)
    rng = np.random.default_rng(seed)
    f1 = rng.standard_normal(A.size)
    f2 = f1 - np.abs(rng.standard_normal(A.size))
    m = resolvent_margins(lam, f1, f2, Potential.bounded("cosine"), weight, A)
    assert m["plain"] >= -1e-10 * m["scale"] and m["plus"] >= -1e-10 * m["scale"]
    assert resolvent_contraction_margin(lam, f1, f2, Potential.bounded("cosine"), weight, A) >= -1e-10 * m["scale"]


@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([1.5, 2.0, 3.0]), st.booleans())
def test_stroock_varopoulos_random(seed, p, positive):
    A = operator(0.5, 64)
    v = np.random.default_rng(seed).standard_normal(A.size)
    if positive:
        v = np.abs(v)
    m, scale = stroock_varopoulos_margin(v, p, A, return_scale=True)
    assert m >= -1e-8 * scale


# -- counterexample -------------------------------------------------------------


def test_spike_norms():
    sp = Spike(1.0, 0.5, 0.0, 0.25)
    # int_{|x|<r} |x|^{-a p} dx = 2 r^{1-ap} / (1-ap)
    assert sp.lp_norm(1.5) == pytest.approx((2 * 0.25**0.25 / 0.25) ** (1 / 1.5), rel=1e-10)
    assert math.isinf(sp.lp_norm(2.0))


def test_counterexample_precondition():
    with pytest.raises(ConfigurationError):
        counterexample_experiment(0.5, Potential.bounded("bump"), Spike(1.0, 0.9), q=16.0, p=1.1,
                                  sizes=(64, 128), pnorm_cap=1.0)
    with pytest.raises(ConfigurationError):
        # the spike is in L^q: no counterexample
        counterexample_experiment(0.5, Potential.bounded("bump"), Spike(0.05, 0.01), q=2.0, p=1.1,
                                  sizes=(64, 128))


def test_counterexample_small_run_grows():
    rep = counterexample_experiment(0.5, Potential.bounded("bump"), Spike(0.05, 0.9), q=16.0, p=1.1,
                                    sizes=(128, 256, 512))
    assert rep.positivity_ok and min(rep.growth) > 1.3
