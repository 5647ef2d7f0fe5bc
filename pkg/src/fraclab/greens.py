"""Green operator of the ball, torsion function, phi_delta and kernel-bound checks.

On an interval the Green operator is discretized by cell averages: with
``W_ij = int_{cell i} int_{cell j} G(x, y) dy dx`` the discrete solution is
``u_i = sum_j W_ij f_j / |cell i|``. The matrix ``W`` is symmetric, so the
discrete operator is self-adjoint in the lumped inner product up to rounding.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, MatrixInvariantError, PreconditionError
from .grid import BallDomain, GradedGrid, GridFunction, build_graded_grid, cell_integrals, default_grading, pair_distance
from .special import _incomplete_integral, check_order, green_kernel, green_kernel_1d, green_prefactor, torsion_constant

__all__ = [
    "RadialProfile",
    "KernelBoundReport",
    "green_matrix",
    "green_solve",
    "cell_averages",
    "torsion_function",
    "phi_delta",
    "verify_kernel_bounds",
    "comparison_kernel",
    "hopf_kernel_constant",
]


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial function on a ball, zero outside; linear between the given radii."""

    domain: BallDomain
    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise ValueError("radii and values must be 1D arrays of equal length")
        if np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] >= self.domain.R:
            raise ValueError("radii must be strictly increasing in [0, R)")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)

    def __call__(self, rho):
        return np.interp(rho, self.radii, self.values)


# ---------------------------------------------------------------------------
# cell quadrature


def _tau(grid: GradedGrid, gap):
    return (np.asarray(gap) / grid.R) ** (1.0 / grid.q)


def _cell_rule(grid: GradedGrid, m: int):
    """Gauss rule with ``m`` points per cell in the grading variable.

    The grading variable ``tau = (delta/R)^{1/q}`` straightens the boundary
    layer, so ``delta^s``-type integrands become smooth. The cell that
    contains the origin is split there, ``m/2`` points per half.

    Returns coordinates, exact gaps and weights, each of shape ``(N, m)``.
    """
    if m % 2:
        raise ValueError("cell rule needs an even point count")
    R, q = grid.R, grid.q
    xb, gb = grid.cell_bounds, grid.bound_gaps
    N = grid.size

    def rule(k):
        z, w = np.polynomial.legendre.leggauss(k)
        return 0.5 * (z + 1.0), 0.5 * w

    X = np.empty((N, m))
    Gp = np.empty((N, m))
    W = np.empty((N, m))
    one_side = (xb[:-1] >= 0) | (xb[1:] <= 0)

    def fill(rows, t0, t1, sign, cols, k):
        z, w = rule(k)
        tau = t0[:, None] + (t1 - t0)[:, None] * z[None, :]
        gap = R * tau**q
        X[rows[:, None], cols] = sign[:, None] * (R - gap)
        Gp[rows[:, None], cols] = gap
        W[rows[:, None], cols] = np.abs(t1 - t0)[:, None] * w[None, :] * q * R * tau ** (q - 1.0)

    rows = np.nonzero(one_side)[0]
    sign = np.where(xb[rows] + xb[rows + 1] > 0, 1.0, -1.0)
    fill(rows, _tau(grid, gb[rows]), _tau(grid, gb[rows + 1]), sign, np.arange(m)[None, :], m)
    rows = np.nonzero(~one_side)[0]
    if rows.size:
        ones = np.ones(rows.size)
        half = m // 2
        fill(rows, _tau(grid, gb[rows]), ones, -ones, np.arange(half)[None, :], half)
        fill(rows, _tau(grid, gb[rows + 1]), ones, ones, np.arange(half, m)[None, :], half)
    return X, Gp, W


def cell_averages(grid: GradedGrid, f, m: int = 16) -> np.ndarray:
    """Cell averages of a callable ``f(x, delta)`` (or ``f(x)``)."""
    X, Gp, W = _cell_rule(grid, m)
    try:
        vals = f(X, Gp)
    except TypeError:
        vals = f(X)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), X.shape)
    return np.sum(vals * W, axis=1) / grid.cell_widths


def _truncated_power_averages(grid: GradedGrid, s: float, k: float | None) -> np.ndarray:
    """Exact cell averages of ``delta^{-s}`` or of ``min(delta^{-s}, k)``."""
    full = cell_integrals(grid, -s)
    if k is None:
        return full / grid.cell_widths
    k = float(k)
    dk = k ** (-1.0 / s)  # delta^{-s} > k below this distance
    xb, gb = grid.cell_bounds, grid.bound_gaps
    out = np.empty(grid.size)
    R = grid.R
    for i in range(grid.size):
        if xb[i] >= 0 or xb[i + 1] <= 0:
            segs = [(min(gb[i], gb[i + 1]), max(gb[i], gb[i + 1]))]
        else:
            segs = [(gb[i], R), (gb[i + 1], R)]
        tot = 0.0
        for lo, hi in segs:
            cap_hi = min(hi, dk)
            if cap_hi > lo:
                tot += k * (cap_hi - lo)
            lo2 = max(lo, dk)
            if hi > lo2:
                tot += (hi ** (1.0 - s) - lo2 ** (1.0 - s)) / (1.0 - s)
        out[i] = tot
    return out / grid.cell_widths


# ---------------------------------------------------------------------------
# Green matrix


def _tanh_sinh(n: int = 40, hstep: float = 0.12):
    """Tanh-sinh nodes on (0, 1) with accurate complements and weights."""
    k = np.arange(-n, n + 1) * hstep
    u = 0.5 * math.pi * np.sinh(k)
    lo = 1.0 / (1.0 + np.exp(2.0 * u))  # node
    hi = 1.0 / (1.0 + np.exp(-2.0 * u))  # one minus node
    w = hstep * 0.5 * math.pi * np.cosh(k) / (2.0 * np.cosh(u) ** 2)
    keep = (lo > 0) & (hi > 0)
    return lo[keep], hi[keep], w[keep]


def _near_block(s, R, a, b, c, d, coord_is_gap):
    """``int_a^b int_c^d G`` for cells that touch or coincide.

    ``(a, b)``, ``(c, d)`` are intervals in a coordinate ``xi`` which is either
    the exact gap ``delta`` (cells on one side) or ``x`` itself. The integral
    is rewritten over ``r = xi_x - xi_y`` (tanh-sinh, which absorbs the
    diagonal singularity) and ``xi_x`` (Gauss-Legendre).
    """
    P = a.size
    zl, zh, wt = _tanh_sinh()
    gz, gw = np.polynomial.legendre.leggauss(8)
    gz, gw = 0.5 * (gz + 1.0), 0.5 * gw
    cuts = np.stack([a - d, a - c, b - d, b - c, np.zeros(P)], axis=1)
    lo_r, hi_r = a - d, b - c
    cuts = np.clip(cuts, lo_r[:, None], hi_r[:, None])
    cuts.sort(axis=1)
    total = np.zeros(P)
    for k in range(4):
        r0, r1 = cuts[:, k], cuts[:, k + 1]
        width = r1 - r0
        ok = width > 0
        if not ok.any():
            continue
        # r measured from whichever end is closer to the origin keeps tiny |r| exact
        from_lo = np.abs(r0) <= np.abs(r1)
        r = np.where(from_lo[:, None], r0[:, None] + width[:, None] * zl[None, :],
                     r1[:, None] - width[:, None] * zh[None, :])
        xlo = np.maximum(a[:, None], c[:, None] + r)
        xhi = np.minimum(b[:, None], d[:, None] + r)
        seg = np.maximum(xhi - xlo, 0.0)
        xi = xlo[:, :, None] + seg[:, :, None] * gz[None, None, :]
        eta = xi - r[:, :, None]
        if coord_is_gap:
            dx, dy = xi, eta
        else:
            dx, dy = R - np.abs(xi), R - np.abs(eta)
        dist = np.abs(r)[:, :, None] * np.ones_like(xi)
        with np.errstate(all="ignore"):
            Gv = green_kernel_1d(s, R, dx, dy, dist)
        Gv = np.where((dist > 0) & (dx > 0) & (dy > 0), Gv, 0.0)
        inner = np.sum(Gv * gw[None, None, :], axis=2) * seg
        total += np.where(ok, np.sum(inner * wt[None, :], axis=1) * width, 0.0)
    return total


_W_CACHE: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
_W_CACHE_SIZE = 4


def green_matrix(grid: GradedGrid, s: float, chunk: int = 96) -> np.ndarray:
    """Symmetric matrix ``W_ij = int_{cell i} int_{cell j} G``, cached per grid and order."""
    s = check_order(s)
    key = (grid.N, grid.q, grid.R, s)
    if key in _W_CACHE:
        _W_CACHE.move_to_end(key)
        return _W_CACHE[key]
    N, R = grid.size, grid.R
    W = np.empty((N, N))
    x2, g2, w2 = _cell_rule(grid, 2)
    J = np.arange(N)
    widths = grid.cell_widths
    xb, gb = grid.cell_bounds, grid.bound_gaps
    mid_i, mid_j = [], []
    for i0 in range(0, N, chunk):
        I = np.arange(i0, min(N, i0 + chunk))
        d = pair_distance(x2[I][:, :, None, None], g2[I][:, :, None, None], x2[None, None], g2[None, None])
        with np.errstate(all="ignore"):
            Gv = green_kernel_1d(s, R, g2[I][:, :, None, None], g2[None, None], d)
        W[I] = np.einsum("ia,iajb,jb->ij", w2[I], Gv, w2, optimize=True)
        lo = np.minimum(I[:, None], J[None, :])
        hi = np.maximum(I[:, None], J[None, :])
        gap = pair_distance(xb[lo + 1], gb[lo + 1], xb[hi], gb[hi])
        ratio = gap / np.maximum(widths[I][:, None], widths[None, :])
        a, b = np.nonzero((hi - lo >= 2) & (ratio < 16.0) & (I[:, None] < J[None, :]))
        mid_i.append(I[a])
        mid_j.append(b)
    ii, jj = np.concatenate(mid_i), np.concatenate(mid_j)
    x6, g6, w6 = _cell_rule(grid, 6)
    for k0 in range(0, ii.size, 20000):
        a, b = ii[k0:k0 + 20000], jj[k0:k0 + 20000]
        d = pair_distance(x6[a][:, :, None], g6[a][:, :, None], x6[b][:, None, :], g6[b][:, None, :])
        Gv = green_kernel_1d(s, R, g6[a][:, :, None], g6[b][:, None, :], d)
        W[a, b] = W[b, a] = np.einsum("ka,kab,kb->k", w6[a], Gv, w6[b])
    # coinciding and touching cells
    ii = np.concatenate([np.arange(N), np.arange(N - 1)])
    jj = np.concatenate([np.arange(N), np.arange(1, N)])
    one_side = ((xb[ii] >= 0) & (xb[jj] >= 0)) | ((xb[ii + 1] <= 0) & (xb[jj + 1] <= 0))
    vals = np.empty(ii.size)
    if one_side.any():
        p, q_ = ii[one_side], jj[one_side]
        a = np.minimum(gb[p], gb[p + 1])
        b = np.maximum(gb[p], gb[p + 1])
        c = np.minimum(gb[q_], gb[q_ + 1])
        d = np.maximum(gb[q_], gb[q_ + 1])
        vals[one_side] = _near_block(s, R, a, b, c, d, True)
    if (~one_side).any():
        p, q_ = ii[~one_side], jj[~one_side]
        vals[~one_side] = _near_block(s, R, xb[p], xb[p + 1], xb[q_], xb[q_ + 1], False)
    W[ii, jj] = vals
    W[jj, ii] = vals
    W = 0.5 * (W + W.T)
    W.flags.writeable = False
    _W_CACHE[key] = W
    while len(_W_CACHE) > _W_CACHE_SIZE:
        _W_CACHE.popitem(last=False)
    return W


# ---------------------------------------------------------------------------
# solution operator


def _radial_solve(profile: RadialProfile, s: float, targets=None, n_angle: int = 64):
    dom = profile.domain
    n, R = dom.n, dom.R
    targets = profile.radii if targets is None else np.asarray(targets, dtype=float)
    z, w = np.polynomial.legendre.leggauss(n_angle // 2)
    z, w = 0.5 * (z + 1.0), 0.5 * w

    def angular(r, rho):
        # integral of G(r e1, rho omega) over the unit sphere
        if n == 1:
            return float(green_kernel(1, s, R, r, rho) + green_kernel(1, s, R, r, -rho)) \
                if rho != r else float(green_kernel(1, s, R, r, -rho))
        # cluster half of the polar nodes near theta = 0 where the kernel peaks
        th_c = min(math.pi, 8.0 * abs(r - rho) / max(r, rho, 1e-300) + 1e-12)
        th = np.concatenate([th_c * z, th_c + (math.pi - th_c) * z])
        wt = np.concatenate([th_c * w, (math.pi - th_c) * w])
        d2 = r * r + rho * rho - 2.0 * r * rho * np.cos(th)
        d2 = np.maximum(d2, 0.0)
        ok = d2 > 0
        r0 = (R * R - r * r) * (R * R - rho * rho) / (R * R * np.where(ok, d2, 1.0))
        Gv = np.where(ok, green_prefactor(n, s) * np.where(ok, d2, 1.0) ** (s - 0.5 * n)
                      * _incomplete_integral(n, s, r0), 0.0)
        if n == 2:
            return 2.0 * float(np.sum(wt * Gv))
        return 2.0 * math.pi * float(np.sum(wt * Gv * np.sin(th)))

    out = np.empty(targets.size)
    for k, r in enumerate(targets):
        fun = lambda rho: profile(rho) * rho ** (n - 1) * angular(r, rho)  # noqa: E731
        pts = [r] if 0 < r < R else None
        val, _ = integrate.quad(fun, 0.0, R, points=pts, limit=200, epsrel=1e-8)
        out[k] = val
    return out


def green_solve(f, s: float, domain: BallDomain | None = None, grid: GradedGrid | None = None):
    """Apply the Green operator of the ball.

    Parameters
    ----------
    f : GridFunction, RadialProfile or callable
        Grid functions are read as cell values. Callables ``f(x, delta)`` are
        averaged over cells on ``grid``. Radial profiles (any dimension) are
        integrated against the angular average of the kernel.
    s : float
    domain : BallDomain, optional
        Needed only for radial profiles whose domain differs from ``f.domain``.
    grid : GradedGrid, optional
        Required for callables.

    Returns
    -------
    GridFunction or RadialProfile
        Same kind as the input (callables give a GridFunction).
    """
    s = check_order(s)
    if isinstance(f, RadialProfile):
        return RadialProfile(f.domain, f.radii, _radial_solve(f, s))
    if isinstance(f, GridFunction):
        grid = f.grid
        if not isinstance(grid, GradedGrid):
            raise ConfigurationError("green_solve needs a GradedGrid")
        fbar = f.values
    else:
        if grid is None:
            raise ConfigurationError("a grid is required to discretize callable data")
        _check_data_class(f, s, grid.R)
        fbar = cell_averages(grid, f)
        if not np.all(np.isfinite(fbar)):
            raise PreconditionError("data are not integrable against delta^s on the grid cells")
    W = green_matrix(grid, s)
    u = W @ fbar / grid.cell_widths
    return GridFunction(grid, u, {"s": s})


def _check_data_class(f, s: float, R: float, first: int = 20, last: int = 40) -> None:
    """Reject data whose ``delta^s``-weighted mass does not decay into the boundary.

    Shell integrals of ``|f| delta^s`` over ``[2^{-j-1} R, 2^{-j} R]`` at both
    ends are compared at ``j = first`` and ``j = last``; power-type blow-up
    (``f ~ delta^{-1-s}`` or worse) keeps them from decaying. Logarithmic
    borderline cases are not decided here.
    """
    z, w = np.polynomial.legendre.leggauss(8)

    def shell(j):
        lo, hi = R * 2.0 ** (-j - 1), R * 2.0 ** (-j)
        d = lo + (hi - lo) * 0.5 * (z + 1)
        tot = 0.0
        for sign in (-1.0, 1.0):
            with np.errstate(all="ignore"):
                v = np.abs(np.asarray(f(sign * (R - d), d), dtype=float)) * d**s
            tot += float(np.sum(w * v)) * 0.5 * (hi - lo)
        return tot

    a, b = shell(first), shell(last)
    if not np.isfinite(b) or (a > 0 and b >= 0.9 * a) or (a == 0 and b > 0):
        raise PreconditionError(
            "data are not in L1(delta^s): the weighted mass of dyadic boundary shells does not decay "
            f"(shell {first}: {a:.3g}, shell {last}: {b:.3g}); the solution would blow up")


def _grid_for(domain: BallDomain, s: float, resolution):
    if isinstance(resolution, GradedGrid):
        return resolution
    if isinstance(resolution, tuple):
        N, q = resolution
    else:
        N, q = int(resolution), default_grading(s)
    return build_graded_grid(domain.R, N, q)


def torsion_function(domain: BallDomain, s: float, resolution=1024):
    """Torsion function ``phi_0 = G(1)`` on the interval.

    ``resolution`` is a node count, an ``(N, q)`` pair or a grid. The returned
    grid function carries ``meta['lower_constant']``, the smallest
    ``phi_0 / delta^s`` over the nodes.
    """
    s = check_order(s)
    if domain.n != 1:
        raise ConfigurationError("use a RadialProfile with green_solve for n > 1")
    grid = _grid_for(domain, s, resolution)
    u = green_solve(GridFunction(grid, np.ones(grid.size)), s)
    ratio = u.values / grid.delta**s
    return GridFunction(grid, u.values, {"s": s, "lower_constant": float(ratio.min()),
                                         "upper_constant": float(ratio.max()),
                                         "closed_form_constant": torsion_constant(1, s, domain.R)})


def phi_delta(domain: BallDomain, s: float, resolution=1024, k: float | None = None) -> GridFunction:
    """Solution with data ``delta^{-s}`` (or ``min(delta^{-s}, k)``).

    Cell averages of the data are exact, so the boundary cells see the true
    integral of the singular data.
    """
    s = check_order(s)
    grid = _grid_for(domain, s, resolution)
    fbar = _truncated_power_averages(grid, s, k)
    u = green_matrix(grid, s) @ fbar / grid.cell_widths
    return GridFunction(grid, u, {"s": s, "k": k})


# ---------------------------------------------------------------------------
# kernel bounds


@dataclass(frozen=True)
class KernelBoundReport:
    """Fitted constants in ``c B <= G <= C B`` over random pairs."""

    sample_count: int
    lower: float
    upper: float
    worst_low: tuple
    worst_high: tuple
    form: str

    @property
    def spread(self) -> float:
        return self.upper / self.lower


def comparison_kernel(n: int, s: float, dx, dy, dist):
    """Two-sided comparison expression for the Green kernel.

    For ``n > 2s`` this is
    ``|x-y|^{2s-n} (delta(x)/|x-y| ^ 1)^s (delta(y)/|x-y| ^ 1)^s``. When
    ``n <= 2s`` (only possible for ``n = 1``) that expression misses the
    diagonal behaviour of the kernel, and the logarithmic (``n = 2s``) or
    ``min`` (``n < 2s``) forms are used instead.
    """
    dx, dy, dist = (np.asarray(v, dtype=float) for v in (dx, dy, dist))
    if n > 2 * s:
        return dist ** (2 * s - n) * np.minimum(dx / dist, 1.0) ** s * np.minimum(dy / dist, 1.0) ** s
    rho = dx * dy / dist**2
    if n == 2 * s:
        return np.log1p(np.sqrt(rho))
    return dist ** (2 * s - n) * np.minimum(rho**s, rho ** (s - 0.5 * n))


def _sample_pairs(domain: BallDomain, samples: int, seed):
    """Random pairs: uniform, boundary-clustered and diagonal-clustered thirds."""
    rng = np.random.default_rng(seed)
    R = domain.R
    k = samples // 3
    parts = []
    x = rng.uniform(-R, R, k)
    y = rng.uniform(-R, R, k)
    parts.append((x, y))
    # boundary: delta log-uniform in [1e-8 R, R]
    dxb = R * 10.0 ** rng.uniform(-8, 0, k)
    x = np.sign(rng.uniform(-1, 1, k)) * (R - dxb)
    y = rng.uniform(-R, R, k)
    parts.append((x, y))
    m = samples - 2 * k
    x = rng.uniform(-0.9 * R, 0.9 * R, m)
    y = x + np.sign(rng.uniform(-1, 1, m)) * R * 10.0 ** rng.uniform(-6, -1, m)
    parts.append((x, y))
    x = np.concatenate([p[0] for p in parts])
    y = np.concatenate([p[1] for p in parts])
    dx = np.concatenate([R - np.abs(parts[0][0]), dxb, R - np.abs(parts[2][0])])
    dy = R - np.abs(y)
    keep = (dy > 0) & (x != y)
    return x[keep], y[keep], dx[keep], dy[keep]


def verify_kernel_bounds(domain: BallDomain, s: float, samples: int = 10_000, seed=0) -> KernelBoundReport:
    """Fit ``c <= G/B <= C`` over random interior pairs of the interval."""
    s = check_order(s)
    if samples < 100:
        raise ConfigurationError("need at least 100 samples")
    if domain.n != 1:
        raise ConfigurationError("kernel-bound sampling is implemented on intervals")
    x, y, dx, dy = _sample_pairs(domain, samples, seed)
    dist = pair_distance(x, dx, y, dy)
    G = green_kernel_1d(s, domain.R, dx, dy, dist)
    B = comparison_kernel(1, s, dx, dy, dist)
    ratio = G / B
    if not np.all(np.isfinite(ratio)) or np.any(ratio <= 0):
        raise MatrixInvariantError("kernel ratio not finite and positive at every sample")
    lo, hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    form = "product" if 1 > 2 * s else ("log" if 1 == 2 * s else "min")
    return KernelBoundReport(x.size, float(ratio[lo]), float(ratio[hi]),
                             (float(x[lo]), float(y[lo])), (float(x[hi]), float(y[hi])), form)


def hopf_kernel_constant(domain: BallDomain, s: float, samples: int = 10_000, seed=0) -> float:
    """Smallest ``G(x,y) / (delta(x)^s delta(y)^s)`` over random pairs."""
    x, y, dx, dy = _sample_pairs(domain, samples, seed)
    dist = pair_distance(x, dx, y, dy)
    G = green_kernel_1d(s, domain.R, dx, dy, dist)
    return float(np.min(G / (dx * dy) ** s))
