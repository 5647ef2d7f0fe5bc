"""Boundary behaviour: Hopf lower bound, blow-up, trace criterion, flatness.

Solutions behave like ``delta^s`` at the boundary for bounded data and no
potential; potentials at least as strong as ``delta^{-2s}`` push the profile
below ``delta^{s + eps}``. The functions here measure these effects on
graded grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, PreconditionError
from .grid import GapData, GradedGrid, GridFunction, Weight, build_graded_grid, default_grading, weighted_norm
from .operator import assemble_galerkin, pointwise_laplacian
from .schrodinger import Potential, SolveReport
from .special import check_order, gamma_beta, torsion_constant

__all__ = [
    "hopf_constant",
    "BlowupReport",
    "blowup_experiment",
    "power_log_integrable",
    "shell_integrals",
    "grid_reaching",
    "TraceVerdict",
    "trace_equivalence_experiment",
    "SuperSingularReport",
    "super_singular_experiment",
    "barrier_bound",
    "BoundaryFit",
    "fit_boundary_exponent",
    "FlatnessReport",
    "verify_flatness",
    "large_solution_residual",
    "torsion_residual",
]


def _values(f):
    return np.asarray(getattr(f, "values", f), dtype=float)


def hopf_constant(u: GridFunction, f, s: float | None = None) -> float:
    """Smallest ``u / (delta^s ||f delta^s||_1)`` over the nodes.

    Parameters
    ----------
    u : GridFunction
        Solution on a :class:`GradedGrid` with data ``f``.
    f : GridFunction or ndarray
        Nonnegative, not identically zero.
    s : float, optional
        Defaults to ``u.meta['s']``.
    """
    fv = _values(f)
    if np.any(fv < 0) or not np.any(fv > 0):
        raise PreconditionError("Hopf bound needs nonnegative data that is not identically zero")
    s = float(u.meta["s"] if s is None else s)
    grid = u.grid
    mass = weighted_norm(fv, Weight.delta_s(s), 1, grid)
    return float(np.min(u.values / (grid.gaps**s * mass)))


# ---------------------------------------------------------------------------
# integrability of power-log profiles


def power_log_integrable(alpha: float, beta: float) -> bool:
    """Whether ``int_0 t^{-alpha} (1 + |log t|)^{-beta} dt`` is finite."""
    return alpha < 1.0 or (alpha == 1.0 and beta > 1.0)


def shell_integrals(func, R: float = 1.0, levels: int = 40) -> np.ndarray:
    """Integrals of ``func(t)`` over dyadic shells ``[2^{-j-1} R, 2^{-j} R]``.

    Computed in the variable ``log t`` so every shell has the same cost.
    """
    out = np.empty(levels)
    for j in range(levels):
        lo, hi = math.log(R) - (j + 1) * math.log(2.0), math.log(R) - j * math.log(2.0)
        out[j] = integrate.quad(lambda y: func(math.exp(y)) * math.exp(y), lo, hi, epsrel=1e-12)[0]
    return out


def grid_reaching(R: float, N: int, delta_min: float) -> GradedGrid:
    """Graded grid whose boundary node sits at distance ``delta_min``."""
    q = math.log(delta_min / R) / math.log(2.0 / (N + 1))
    if q < 1:
        raise ConfigurationError(f"delta_min = {delta_min:g} is not reachable with N = {N}")
    return build_graded_grid(R, N, q)


# ---------------------------------------------------------------------------
# blow-up


@dataclass(eq=False)
class BlowupReport:
    """Center values and L1 norms of ``u_k`` with data ``min(f, k)``."""

    levels: list
    center_values: list
    l1_norms: list
    ratios: list
    increments: list
    admissible: bool | None
    min_ratio: float = 1.2

    @property
    def blows_up(self) -> bool:
        """Growth by at least ``min_ratio`` between consecutive levels."""
        return all(r >= self.min_ratio for r in self.ratios)

    @property
    def converges(self) -> bool:
        """Increments shrink geometrically (last below a tenth of the first)."""
        inc = np.abs(self.increments)
        return bool(inc[-1] <= 0.1 * inc[0])


def blowup_experiment(f_singular, s: float, levels=(10.0, 1e2, 1e3, 1e4), N: int = 2048,
                      q: float | None = None, R: float = 1.0, admissible: bool | None = None,
                      min_ratio: float = 1.2) -> BlowupReport:
    """Solve with data ``f_k = min(f, k)`` along the levels.

    Parameters
    ----------
    f_singular : callable
        ``f(delta)``, nonnegative, as a function of the boundary distance.
    admissible : bool, optional
        Known integrability of ``f delta^s`` (recorded in the report).
    """
    s = check_order(s)
    grid = build_graded_grid(R, N, default_grading(s) if q is None else q)
    A = assemble_galerkin(grid, s)
    f = np.asarray(f_singular(grid.gaps), dtype=float)
    if np.any(f < 0):
        raise PreconditionError("blow-up data must be nonnegative")
    centre, l1 = [], []
    for k in levels:
        u = A.solve(A.mass * np.minimum(f, k))
        centre.append(float(np.interp(0.0, grid.nodes, u)))
        l1.append(weighted_norm(u, Weight(), 1, grid))
    c = np.asarray(centre)
    return BlowupReport(list(levels), centre, l1, list(c[1:] / c[:-1]), list(np.diff(c)), admissible, min_ratio)


# ---------------------------------------------------------------------------
# trace criterion


@dataclass(eq=False)
class TraceVerdict:
    """Classifier versus refinement behaviour of ``||u/delta^s||_1``.

    ``delta_mins`` are the boundary distances of the first node; each
    refinement doubles ``|log delta_min|``. A convergent norm has
    geometrically shrinking increments, a divergent one does not.
    """

    a: float
    b: float
    classifier_finite: bool
    shells: np.ndarray
    delta_mins: list
    norms: list
    increments: list
    stable: bool
    tail_ratio: float = 0.9

    @property
    def agrees(self) -> bool:
        return self.classifier_finite == self.stable


def _power_log(a, b):
    def f(d):
        d = np.asarray(d, dtype=float)
        return d ** (-a) * (1.0 + np.abs(np.log(d))) ** (-b)

    return f


@lru_cache(maxsize=6)
def _reaching_operator(R: float, N: int, log_delta_min: float, s: float):
    grid = grid_reaching(R, N, R * 10.0**log_delta_min)
    return assemble_galerkin(grid, s)


def trace_equivalence_experiment(a: float, b: float, s: float, N: int = 2048,
                                 log_delta_mins=(-4.0, -8.0, -16.0), R: float = 1.0,
                                 V: Potential | None = None, tail_ratio: float = 0.9,
                                 noise_floor: float = 1e-3) -> TraceVerdict:
    """Data ``f = delta^{-a} (1 + |log delta|)^{-b}`` against the trace criterion.

    The classifier is the integrability of ``f delta^s (1 + |log delta|)``;
    the observable is ``||u / delta^s||_1`` on grids whose first node moves
    to ``10^{log_delta_min}``. The norm counts as stable when the last
    increment is at most ``tail_ratio`` times the first, or below
    ``noise_floor`` times the norm. Doubling ``|log delta_min|`` shrinks the
    increments of a convergent power-log tail (towards half, asymptotically),
    while a divergent one keeps or grows them.
    """
    s = check_order(s)
    if not power_log_integrable(a - s, b):
        raise PreconditionError("f delta^s must be integrable for a solution to exist")
    f = _power_log(a, b)
    finite = power_log_integrable(a - s, b - 1.0)
    shells = shell_integrals(lambda t: f(t) * t**s * (1.0 + abs(math.log(t))), R, 24)
    V = V or Potential.zero()
    norms, dmins = [], []
    for ld in log_delta_mins:
        A = _reaching_operator(float(R), int(N), float(ld), s)
        grid = A.grid
        data = GapData(f, f"power-log {a} {b}")
        # on a fixed grid the truncation limit is the untruncated system
        B = A if V.is_zero else A.shifted(V.on_grid(grid))
        u = B.solve(data.hat_load(grid))
        norms.append(weighted_norm(u, Weight("delta_s", power=-s), 1, grid))
        dmins.append(float(grid.gaps[0]))
    inc = list(np.diff(norms))
    stable = abs(inc[-1]) <= tail_ratio * abs(inc[0]) or abs(inc[-1]) <= noise_floor * abs(norms[-1])
    return TraceVerdict(a, b, finite, shells, dmins, norms, inc, bool(stable), tail_ratio)


@dataclass(eq=False)
class SuperSingularReport:
    """``||u/delta^s||_1`` relative to the discrete ``||f delta^s||_1``, with and without ``V``.

    ``ratios`` belong to ``V = C_V delta^{-2s}``, ``control`` to ``V = 0``.
    """

    a: float
    b: float
    phi_delta_finite: bool
    delta_mins: list
    norms: list
    data_norms: list
    ratios: list
    control: list
    tolerance: float = 0.05

    @property
    def changes(self) -> list:
        r = np.asarray(self.ratios)
        return list(np.abs(r[1:] / r[:-1] - 1.0))

    @property
    def control_growth(self) -> list:
        c = np.asarray(self.control)
        return list(c[1:] / c[:-1])

    @property
    def stable(self) -> bool:
        return all(c <= self.tolerance for c in self.changes)

    @property
    def control_diverges(self) -> bool:
        return all(g >= 1.0 + self.tolerance for g in self.control_growth)


def super_singular_experiment(s: float, C_V: float = 1.0, b: float = 2.0, N: int = 2048,
                              log_delta_mins=(-4.0, -8.0, -16.0), R: float = 1.0,
                              tolerance: float = 0.05) -> SuperSingularReport:
    """Trace norm under ``V = C_V delta^{-2s}`` for data with ``f phi_delta`` not integrable.

    The data ``f = delta^{-1-s} (1 + |log delta|)^{-b}`` with ``1 < b <= 2``
    has ``f delta^s`` integrable but ``f delta^s (1 + |log delta|)`` not.
    The ratio ``||u/delta^s||_1 / ||f delta^s||_1`` (both discrete, with the
    data norm taken from the same hat load) must settle under refinement;
    without the potential it keeps growing.
    """
    s = check_order(s)
    a = 1.0 + s
    if not (power_log_integrable(a - s, b) and not power_log_integrable(a - s, b - 1.0)):
        raise ConfigurationError("need 1 < b <= 2 so that f delta^s is integrable but f phi_delta is not")
    data = GapData(_power_log(a, b))
    norms, dnorms, ratios, control, dmins = [], [], [], [], []
    for ld in log_delta_mins:
        A = _reaching_operator(float(R), int(N), float(ld), s)
        grid = A.grid
        load = data.hat_load(grid)
        fm = float(load @ grid.gaps**s)
        w = Weight("delta_s", power=-s)
        u = A.shifted(C_V * grid.gaps ** (-2.0 * s)).solve(load)
        u0 = A.solve(load)
        nu = weighted_norm(u, w, 1, grid)
        norms.append(nu)
        dnorms.append(fm)
        ratios.append(nu / fm)
        control.append(weighted_norm(u0, w, 1, grid) / fm)
        dmins.append(float(grid.gaps[0]))
    return SuperSingularReport(a, b, False, dmins, norms, dnorms, ratios, control, tolerance)


# ---------------------------------------------------------------------------
# flatness


def barrier_bound(s: float, eps: float, C_V: float, f_sup: float, R: float) -> float:
    """``f_sup R^{s - eps} / (gamma_{s+eps} + C_V)``.

    ``R`` is the largest distance from the boundary point to the closure of
    the domain (the diameter for an interval).
    """
    s = check_order(s)
    if not 0 < eps < s:
        raise ConfigurationError("eps must lie in (0, s)")
    if f_sup <= 0 or R <= 0:
        raise ConfigurationError("f_sup and R must be positive")
    g = gamma_beta(1, s, s + eps)
    if not C_V > -g:
        raise PreconditionError(f"barrier needs C_V > -gamma_(s+eps) = {-g:.6g}")
    return f_sup * R ** (s - eps) / (g + C_V)


@dataclass(eq=False)
class BoundaryFit:
    """Least-squares exponent of shell suprema against the boundary distance."""

    distances: np.ndarray
    suprema: np.ndarray
    exponent: float
    stderr: float
    residual: float

    @property
    def band(self) -> tuple:
        return (self.exponent - 2 * self.stderr, self.exponent + 2 * self.stderr)


def fit_boundary_exponent(u: GridFunction, j_min: int = 3, j_max: int | None = None,
                          skip_cells: int = 2, min_levels: int = 6) -> BoundaryFit:
    """Fit ``sup_{shell j} |u| ~ delta_j^alpha`` over dyadic shells.

    Shell ``j`` holds the nodes with ``2^{-j-1} R < delta <= 2^{-j} R``; the
    ``skip_cells`` nodes closest to each end are discarded.
    """
    grid = u.grid
    R = grid.half_width
    d = grid.gaps.copy()
    vals = np.abs(u.values)
    keep = np.ones(d.size, bool)
    keep[:skip_cells] = False
    keep[d.size - skip_cells:] = False
    dmin = d[keep].min()
    if j_max is None:
        j_max = int(math.floor(math.log2(R / dmin))) - 1
    js, sups = [], []
    for j in range(j_min, j_max + 1):
        sel = keep & (d <= R * 2.0**-j) & (d > R * 2.0 ** (-j - 1))
        if np.any(sel):
            js.append(j)
            sups.append(vals[sel].max())
    if len(js) < min_levels:
        raise ConfigurationError(f"only {len(js)} dyadic shells resolved, need {min_levels}")
    x = np.log(R * 2.0 ** -np.asarray(js, float))
    y = np.log(np.asarray(sups))
    X = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = max(len(x) - 2, 1)
    sigma2 = float(resid @ resid) / dof
    stderr = math.sqrt(sigma2 / float(np.sum((x - x.mean()) ** 2)))
    return BoundaryFit(np.exp(x), np.asarray(sups), float(coef[0]), stderr, float(math.sqrt(np.mean(resid**2))))


@dataclass(eq=False)
class FlatnessReport:
    bound: float
    max_ratio: float
    margin: float
    fit: BoundaryFit
    near_boundary_ratios: list = field(default_factory=list)
    tolerance: float = 0.05

    @property
    def within_bound(self) -> bool:
        return self.margin >= -self.tolerance * self.bound


def verify_flatness(V: Potential, f, eps: float, report: SolveReport, tolerance: float = 0.05) -> FlatnessReport:
    """Compare ``u / delta^{s+eps}`` with the barrier constant.

    ``V`` must be ``C_V delta^{-2s}``. The barrier is centred at the nearest
    boundary point, whose farthest point in the closed interval is at ``2R``.
    """
    if V.kind != "power_singular":
        raise ConfigurationError("flatness barrier needs a power potential")
    u = report.u
    s = float(u.meta["s"])
    if not math.isclose(V.params["p"], 2 * s, rel_tol=1e-12):
        raise ConfigurationError("flatness barrier needs the exponent 2s")
    grid = u.grid
    fv = _values(f)
    if np.any(fv < 0):
        raise PreconditionError("flatness barrier needs nonnegative data")
    C_U = barrier_bound(s, eps, V.params["C_V"], float(fv.max()), 2.0 * grid.half_width)
    ratio = u.values / grid.gaps ** (s + eps)
    fit = fit_boundary_exponent(u)
    flat = u.values / grid.gaps**s
    near = [float(flat[:2].max()), float(flat[-2:].max())]
    mx = float(ratio.max())
    return FlatnessReport(C_U, mx, C_U - mx, fit, near, tolerance)


# ---------------------------------------------------------------------------
# large solutions


def _large_solution(s):
    def u(y):
        y = float(y)
        return (1.0 - y * y) ** (s - 1.0) if abs(y) < 1.0 else 0.0

    return u


def large_solution_residual(s: float, points, R: float = 1.0) -> float:
    """Largest ``|(-Delta)^s u| / scale`` for ``u = (R^2 - x^2)^{s-1}`` (zero outside).

    The points must keep distance ``0.1 R`` from the boundary; the scale is
    the sum of magnitudes of the partial integrals of the principal value.
    """
    s = check_order(s)
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    if np.any(R - np.abs(pts) < 0.1 * R):
        raise PreconditionError("sample points must satisfy delta >= 0.1 R")
    base = _large_solution(s)
    u = lambda y: base(y / R)  # noqa: E731
    worst = 0.0
    for x in pts:
        res = pointwise_laplacian(u, s, x, breakpoints=(-R, R), support=(-R, R))
        worst = max(worst, abs(res.value) / res.scale)
    return worst


def torsion_residual(s: float, points, R: float = 1.0) -> np.ndarray:
    """``(-Delta)^s`` of the closed-form torsion function at the points (equals 1)."""
    s = check_order(s)
    C = torsion_constant(1, s, R)

    def u(y):
        y = float(y)
        return C * (R * R - y * y) ** s if abs(y) < R else 0.0

    return np.array([pointwise_laplacian(u, s, x, breakpoints=(-R, R), support=(-R, R)).value
                     for x in np.atleast_1d(points)])
