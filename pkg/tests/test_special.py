import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from fraclab.special import (check_order, gamma_beta, green_kernel, green_kernel_1d, green_prefactor, log_gamma,
                             normalization_constant, torsion_constant)

from oracles import C_NS, GAMMA_BETA, KAPPA, TORSION


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (5.0, math.log(24.0)), (0.5, 0.5 * math.log(math.pi))])
def test_log_gamma_exact_values(x, expected):
    assert log_gamma(x) == pytest.approx(expected, abs=1e-15)


@given(st.floats(min_value=1e-3, max_value=150.0))
def test_log_gamma_matches_mpmath(x):
    ref = float(mp.loggamma(mp.mpf(x)))
    assert abs(log_gamma(x) - ref) <= 1e-15 * max(1.0, abs(ref))


@pytest.mark.parametrize("x", [1.0 + 1e-9, 2.0 - 1e-9, 1.0 + 3e-6])
def test_log_gamma_near_zeros_keeps_relative_accuracy(x):
    ref = float(mp.loggamma(mp.mpf(x)))
    assert log_gamma(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_log_gamma_rejects_bad_input(x):
    with pytest.raises(ValueError):
        log_gamma(x)


@pytest.mark.parametrize("s", [0.0, 1.0, -0.2, math.nan])
def test_order_outside_unit_interval_rejected(s):
    with pytest.raises(ValueError):
        check_order(s)


def test_normalization_constant_half():
    assert normalization_constant(1, 0.5) == pytest.approx(1.0 / math.pi, rel=1e-15)


@pytest.mark.parametrize("key", list(C_NS))
def test_normalization_constant_oracle(key):
    assert normalization_constant(*key) == pytest.approx(C_NS[key], rel=1e-14)


@pytest.mark.parametrize("key", list(TORSION))
def test_torsion_constant_oracle(key):
    assert torsion_constant(*key) == pytest.approx(TORSION[key], rel=1e-14)


def test_torsion_constant_half_is_exactly_one():
    assert torsion_constant(1, 0.5, 1.0) == 1.0


def test_torsion_constant_large_dimension_branch_continuous():
    ref = mp.gamma(mp.mpf(301) / 2) / (4 ** mp.mpf(0.7) * mp.gamma(1.7) * mp.gamma(mp.mpf(301) / 2 + 0.7))
    assert torsion_constant(301, 0.7) == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("key", list(KAPPA))
def test_green_prefactor_oracle(key):
    assert green_prefactor(*key) == pytest.approx(KAPPA[key], rel=1e-14)


@pytest.mark.parametrize("key", list(GAMMA_BETA))
def test_gamma_beta_matches_second_difference_oracle(key):
    s, b = key
    assert gamma_beta(1, s, b) == pytest.approx(GAMMA_BETA[key], rel=1e-13)


@given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.02, max_value=0.98))
def test_gamma_beta_negative_between_s_and_2s(s, t):
    beta = s + t * s
    assert gamma_beta(1, s, beta) < 0


def test_gamma_beta_vanishes_as_beta_to_zero():
    vals = [abs(gamma_beta(1, 0.5, 10.0**-j)) for j in range(2, 8)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-6


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_gamma_beta_diverges_toward_2s(s):
    mags = [abs(gamma_beta(1, s, 2 * s - 10.0**-j)) for j in range(1, 7)]
    assert all(b > a for a, b in zip(mags, mags[1:]))


def test_gamma_beta_pole_raises():
    with pytest.raises(ZeroDivisionError):
        gamma_beta(1, 0.5, 1.0)


def test_green_kernel_half_closed_form():
    # n = 1, s = 1/2: G(x,y) = (1/pi) log((1 - xy + sqrt((1-x^2)(1-y^2))) / |x-y|)
    for x, y in [(0.0, 0.5), (0.3, -0.7), (0.9, 0.95), (-0.99, 0.2)]:
        ref = math.log((1 - x * y + math.sqrt((1 - x * x) * (1 - y * y))) / abs(x - y)) / math.pi
        assert float(green_kernel(1, 0.5, 1.0, x, y)) == pytest.approx(ref, rel=1e-12)


def test_green_kernel_torsion_at_center_is_one():
    def g(y):
        y = float(y)
        return float(green_kernel(1, 0.5, 1.0, 0.0, y)) if 0 < abs(y) < 1 else 0.0

    val = mp.quad(g, [-1, 0, 1])
    assert float(val) == pytest.approx(1.0, rel=1e-8)


@given(st.floats(min_value=-0.99, max_value=0.99), st.floats(min_value=-0.99, max_value=0.99),
       st.sampled_from([0.25, 0.5, 0.75]))
def test_green_kernel_symmetric_and_positive(x, y, s):
    if abs(x - y) < 1e-6:
        return
    g1, g2 = float(green_kernel(1, s, 1.0, x, y)), float(green_kernel(1, s, 1.0, y, x))
    assert g1 > 0 and g1 == pytest.approx(g2, rel=1e-12)


def test_green_kernel_1d_matches_point_form():
    x, y, s = 0.4, -0.8, 0.3
    ref = float(green_kernel(1, s, 1.0, x, y))
    assert float(green_kernel_1d(s, 1.0, 1 - abs(x), 1 - abs(y), abs(x - y))) == pytest.approx(ref, rel=1e-13)


def test_green_kernel_boundary_decay_rate():
    s, y = 0.3, 0.1
    d = [10.0**-j for j in range(4, 9)]
    vals = [float(green_kernel_1d(s, 1.0, di, 1 - y, 1 - di - y)) / di**s for di in d]
    assert max(vals) / min(vals) < 1.01


def test_green_kernel_rejects_outside_points():
    with pytest.raises(ValueError):
        green_kernel(1, 0.5, 1.0, 1.5, 0.0)
    with pytest.raises(ValueError):
        green_kernel(1, 0.5, 1.0, 0.2, 0.2)
