"""Gamma-function layer, normalization constants and the explicit ball Green kernel."""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sp

__all__ = [
    "check_order",
    "log_gamma",
    "normalization_constant",
    "gamma_beta",
    "green_prefactor",
    "green_kernel",
    "green_kernel_1d",
    "torsion_constant",
]

# Taylor coefficients of ln Gamma(1+z) = -euler*z + sum_{k>=2} (-1)^k zeta(k) z^k / k,
# used where ln Gamma is close to zero (x near 1 and 2) and a plain Lanczos
# evaluation loses relative accuracy.
_NTERMS = 40
_LG1P_COEF = np.array(
    [0.0, -np.euler_gamma]
    + [(-1) ** k * sp.zeta(k) / k for k in range(2, _NTERMS)]
)
_SERIES_RADIUS = 0.2


def check_order(s) -> float:
    """Validate a fractional order and return it as a float.

    Raises
    ------
    ValueError
        If ``s`` is not a finite real in the open interval (0, 1).
    """
    s = float(s)
    if not (0.0 < s < 1.0):
        raise ValueError(f"fractional order must lie in (0, 1), got {s!r}")
    return s


def _lgamma1p_series(z: float) -> float:
    # Horner evaluation of the series for ln Gamma(1+z), |z| <= 0.2
    acc = 0.0
    for c in _LG1P_COEF[::-1]:
        acc = acc * z + c
    return acc


def log_gamma(x) -> float:
    """Natural logarithm of the Gamma function for positive arguments.

    Parameters
    ----------
    x : float
        Positive finite argument.

    Returns
    -------
    float
        ``ln Gamma(x)``. Near the zeros at ``x = 1`` and ``x = 2`` a power
        series is used so that the relative error stays at rounding level.

    Raises
    ------
    ValueError
        For non-finite or non-positive input.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"log_gamma requires a finite positive argument, got {x!r}")
    if abs(x - 1.0) <= _SERIES_RADIUS:
        return _lgamma1p_series(x - 1.0)
    if abs(x - 2.0) <= _SERIES_RADIUS:
        z = x - 2.0
        return _lgamma1p_series(z) + math.log1p(z)
    return math.lgamma(x)


def _signed_log_gamma(x: float) -> tuple[float, int]:
    """Return ``(ln|Gamma(x)|, sign Gamma(x))``; sign 0 marks a pole."""
    if x > 0.0:
        return log_gamma(x), 1
    if x == math.floor(x):
        return math.inf, 0
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    sn = math.sin(math.pi * x)
    return math.log(math.pi) - math.log(abs(sn)) - log_gamma(1.0 - x), (1 if sn > 0 else -1)


def normalization_constant(n: int, s: float) -> float:
    """Constant ``c_{n,s}`` giving the fractional Laplacian the symbol ``|xi|^{2s}``.

    ``c_{n,s} = 4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|)``, evaluated with
    ``|Gamma(-s)| = Gamma(1-s)/s``.
    """
    s = check_order(s)
    n = int(n)
    if n < 1:
        raise ValueError("dimension must be >= 1")
    logc = (
        s * math.log(4.0)
        + math.log(s)
        + log_gamma(0.5 * n + s)
        - 0.5 * n * math.log(math.pi)
        - log_gamma(1.0 - s)
    )
    return math.exp(logc)


def gamma_beta(n: int, s: float, beta: float) -> float:
    """Constant in ``(-Delta)^s |x|^beta = gamma_beta |x|^{beta - 2s}``.

    Parameters
    ----------
    n : int
        Space dimension.
    s : float
        Fractional order.
    beta : float
        Positive exponent. The poles ``beta = 2s + 2k`` raise; where one of
        the denominator Gamma factors has a pole the constant is 0.

    Returns
    -------
    float
    """
    s = check_order(s)
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0.0:
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    pole = (beta - 2.0 * s) / 2.0
    if abs(pole - round(pole)) < 1e-14 and round(pole) >= 0:
        raise ZeroDivisionError(f"gamma_beta diverges at beta = {beta!r} (beta - 2s is an even integer)")
    terms_num = [_signed_log_gamma(0.5 * (n + beta)), _signed_log_gamma(s - 0.5 * beta)]
    terms_den = [_signed_log_gamma(-0.5 * beta), _signed_log_gamma(-s + 0.5 * (beta + n))]
    if any(sg == 0 for _, sg in terms_den):
        return 0.0
    logv = 2.0 * s * math.log(2.0)
    sign = 1
    for lv, sg in terms_num:
        logv += lv
        sign *= sg
    for lv, sg in terms_den:
        logv -= lv
        sign *= sg
    return sign * math.exp(logv)


def torsion_constant(n: int, s: float, R: float = 1.0) -> float:
    """Constant ``C`` with ``(-Delta)^s [C (R^2 - |x|^2)_+^s] = 1`` in the ball."""
    s = check_order(s)
    if n < 300:
        # direct gammas keep exact cases exact (C = 1 for n = 1, s = 1/2)
        return float(sp.gamma(0.5 * n) / (4.0**s * sp.gamma(1.0 + s) * sp.gamma(0.5 * n + s)))
    return math.exp(
        log_gamma(0.5 * n) - s * math.log(4.0) - log_gamma(1.0 + s) - log_gamma(0.5 * n + s)
    )


def green_prefactor(n: int, s: float) -> float:
    """``kappa_{n,s} = Gamma(n/2) / (4^s pi^{n/2} Gamma(s)^2)``."""
    s = check_order(s)
    return math.exp(
        log_gamma(0.5 * n) - s * math.log(4.0) - 0.5 * n * math.log(math.pi) - 2.0 * log_gamma(s)
    )


def _incomplete_integral(n: int, s: float, r0):
    """``int_0^{r0} t^{s-1} (1+t)^{-n/2} dt`` for arrays ``r0 >= 0``.

    Written as an incomplete Beta function ``B_z(s, n/2 - s)`` with
    ``z = r0/(1+r0)``; negative second parameters go through one step of the
    contiguous relation.
    """
    r0 = np.asarray(r0, dtype=float)
    a = s
    b = 0.5 * n - s
    z = r0 / (1.0 + r0)
    omz = 1.0 / (1.0 + r0)
    if abs(b) < 1e-15:
        # n = 1, s = 1/2
        return 2.0 * np.arcsinh(np.sqrt(r0))
    if b > 0:
        return sp.betainc(a, b, z) * sp.beta(a, b)
    # B_z(a, b) = ((a+b)/b) B_z(a, b+1) - z^a (1-z)^b / b
    b1 = b + 1.0
    head = sp.betainc(a, b1, z) * sp.beta(a, b1)
    with np.errstate(divide="ignore", over="ignore"):
        tail = z**a * omz**b / b
    return (a + b) / b * head - tail


def green_kernel_1d(s: float, R: float, dx, dy, dist):
    """Green kernel of the interval ``(-R, R)`` from boundary distances.

    Parameters
    ----------
    s : float
        Fractional order.
    R : float
        Half-length of the interval.
    dx, dy : array_like
        Distances ``R - |x|`` and ``R - |y|`` (exact values, so that points
        very close to the boundary keep their relative accuracy).
    dist : array_like
        ``|x - y| > 0``.

    Returns
    -------
    ndarray
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    dist = np.asarray(dist, dtype=float)
    kappa = green_prefactor(1, s)
    # R^2 - x^2 = d (2R - d)
    r0 = dx * (2.0 * R - dx) * dy * (2.0 * R - dy) / (R * R * dist * dist)
    return kappa * dist ** (2.0 * s - 1.0) * _incomplete_integral(1, s, r0)


def green_kernel(n: int, s: float, R: float, x, y):
    """Explicit Green function of the ball ``B_R`` for ``(-Delta)^s``.

    ``G(x, y) = kappa |x-y|^{2s-n} int_0^{r0} t^{s-1} (1+t)^{-n/2} dt`` with
    ``r0 = (R^2 - |x|^2)(R^2 - |y|^2) / (R^2 |x-y|^2)``.

    Parameters
    ----------
    n : int
        Dimension; points are scalars for ``n = 1`` and ``(..., n)`` arrays
        otherwise.
    s, R : float
        Order and radius.
    x, y : array_like
        Points strictly inside the ball, broadcast against each other.

    Returns
    -------
    ndarray or float

    Raises
    ------
    ValueError
        If a point is outside the open ball or ``x = y``.
    """
    s = check_order(s)
    R = float(R)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if n == 1:
        rx, ry, dist = np.abs(x), np.abs(y), np.abs(x - y)
    else:
        rx = np.linalg.norm(x, axis=-1)
        ry = np.linalg.norm(y, axis=-1)
        dist = np.linalg.norm(x - y, axis=-1)
    if np.any(rx >= R) or np.any(ry >= R):
        raise ValueError("green_kernel points must lie in the open ball")
    if np.any(dist == 0):
        raise ValueError("green_kernel is singular at x = y")
    r0 = (R * R - rx * rx) * (R * R - ry * ry) / (R * R * dist * dist)
    out = green_prefactor(n, s) * dist ** (2.0 * s - n) * _incomplete_integral(n, s, r0)
    return out if out.ndim else float(out)
