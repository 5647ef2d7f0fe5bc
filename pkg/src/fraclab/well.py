"""Finite wells on a large interval and their limit as the well deepens.

The whole line is replaced by ``(-L, L)`` with zero data beyond ``+-L``. The
potential is ``min(k, V)`` inside ``Omega = (-R, R)`` and ``k`` outside, and
``k -> inf`` should recover the Dirichlet problem posed in ``Omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .grid import GradedGrid, GridFunction, Mesh1D, Weight, weighted_norm
from .operator import OperatorMatrix, assemble_galerkin
from .schrodinger import Potential
from .special import check_order

__all__ = ["ExtendedGrid", "build_extended_grid", "whole_space_solve", "WellReport", "well_limit_experiment"]


@dataclass(eq=False)
class ExtendedGrid:
    """Mesh of ``(-L, L)`` containing the nodes of a graded grid of ``(-R, R)``.

    Attributes
    ----------
    inner : GradedGrid
        Grid of ``Omega``.
    mesh : Mesh1D
        Grid of ``(-L, L)``; its nodes include the inner nodes and ``+-R``.
    inner_index : ndarray
        Positions of the inner nodes in ``mesh``.
    exterior : ndarray of bool
        Nodes with ``|x| > R``.
    """

    inner: GradedGrid
    mesh: Mesh1D
    inner_index: np.ndarray
    exterior: np.ndarray
    n_outer: int
    q_outer: float
    _ops: dict = field(default_factory=dict, repr=False)

    @property
    def R(self) -> float:
        return self.inner.R

    @property
    def L(self) -> float:
        return self.mesh.half_width

    @property
    def size(self) -> int:
        return self.mesh.size

    def operator(self, s: float) -> OperatorMatrix:
        """Galerkin matrix on ``(-L, L)`` (assembled once per ``s``)."""
        if s not in self._ops:
            self._ops[s] = assemble_galerkin(self.mesh, s)
        return self._ops[s]

    def doubled(self) -> "ExtendedGrid":
        """Same inner grid and exterior resolution near ``+-R``, with ``L`` doubled."""
        return build_extended_grid(self.inner, 2.0 * self.L, 2 * self.n_outer, self.q_outer)

    def exterior_integral(self, values) -> float:
        """Trapezoidal ``int_{R < |x| < L} u`` for nodal values on ``mesh`` (zero at ``+-L``)."""
        X, G = self.mesh.extended_nodes()
        v = np.concatenate([[0.0], np.asarray(values, dtype=float), [0.0]])
        h = self.mesh.element_lengths
        left, right = X[:-1], X[1:]
        R = self.R
        out = (left >= R * (1 - 1e-15)) | (right <= -R * (1 - 1e-15))
        return float(np.sum(0.5 * h[out] * (v[:-1][out] + v[1:][out])))


def build_extended_grid(inner, L: float, n_outer: int = 256, q_outer: float = 2.0) -> ExtendedGrid:
    """Extend a graded grid of ``(-R, R)`` to ``(-L, L)``.

    ``n_outer`` nodes on each side of ``Omega`` are graded towards ``+-R``
    with exponent ``q_outer``; the points ``+-R`` themselves are nodes.
    """
    if not isinstance(inner, GradedGrid):
        raise ConfigurationError("inner grid must be a GradedGrid")
    R = inner.R
    L = float(L)
    if L < 4.0 * R:
        raise ConfigurationError(f"outer half-width L = {L:g} must be at least 4R = {4 * R:g}")
    if n_outer < 4 or q_outer < 1:
        raise ConfigurationError("need n_outer >= 4 and q_outer >= 1")
    t = np.arange(1, n_outer + 1) / (n_outer + 1.0)
    # exterior distance to +-R and to +-L, both without cancellation
    e = (L - R) * t**q_outer
    g_out = -(L - R) * np.expm1(q_outer * np.log(t))
    x_out = R + e
    gaps_inner = (L - R) + inner.gaps
    nodes = np.concatenate([-x_out[::-1], [-R], inner.nodes, [R], x_out])
    gaps = np.concatenate([g_out[::-1], [L - R], gaps_inner, [L - R], g_out])
    mesh = Mesh1D(nodes, gaps, L)
    inner_index = np.arange(n_outer + 1, n_outer + 1 + inner.size)
    exterior = np.abs(nodes) > R
    exterior[[n_outer, n_outer + 1 + inner.size]] = False
    return ExtendedGrid(inner, mesh, inner_index, exterior, int(n_outer), float(q_outer))


def _inner_values(f, ext: ExtendedGrid) -> np.ndarray:
    if callable(f) and not isinstance(f, GridFunction):
        vals = np.asarray(f(ext.inner.nodes), dtype=float)
    else:
        vals = np.asarray(getattr(f, "values", f), dtype=float)
    if vals.shape != (ext.inner.size,):
        raise PreconditionError("data must be given on the inner grid (it vanishes outside Omega)")
    return vals


def _well_potential(V_inner: Potential, k: float, ext: ExtendedGrid) -> np.ndarray:
    V = np.full(ext.size, float(k))
    inner = ext.inner
    V[ext.inner_index] = np.minimum(V_inner.evaluate(inner.nodes, inner.gaps, inner.R), k)
    return V


def whole_space_solve(V_inner: Potential, k: float, f, ext: ExtendedGrid, s: float) -> GridFunction:
    """Solve ``(A + M diag(min(k, V))) u = M f`` on ``(-L, L)``.

    ``V`` is ``V_inner`` in ``Omega`` and ``+inf`` outside, so the truncated
    potential is ``k`` on ``|x| >= R``. ``f`` is given on the inner grid.
    """
    s = check_order(s)
    if not k >= 1:
        raise ConfigurationError("well height k must be >= 1")
    fin = _inner_values(f, ext)
    fe = np.zeros(ext.size)
    fe[ext.inner_index] = fin
    A = ext.operator(s)
    u = A.shifted(_well_potential(V_inner, k, ext)).solve(A.mass * fe)
    return GridFunction(ext.mesh, u, {"s": s, "k": float(k)})


@dataclass(eq=False)
class WellReport:
    """Convergence of finite-well solutions to the Dirichlet solution."""

    k: list
    l1_gap: list
    exterior_mass: list
    ratio_k_times_mass: list
    min_dominance: list
    monotone_in_k: bool
    l_doubling_change: float | None = None
    dirichlet_norm: float = math.nan

    @property
    def gap_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.l1_gap[:-1], self.l1_gap[1:]))

    def fitted_constant_spread(self, tail: int = 2) -> float:
        """Ratio of largest to smallest ``k * mass`` over the last ``tail`` levels."""
        r = np.asarray(self.ratio_k_times_mass[-tail:])
        return float(r.max() / r.min())

    def rows(self):
        return [(k, g, m, r) for k, g, m, r in zip(self.k, self.l1_gap, self.exterior_mass, self.ratio_k_times_mass)]


def well_limit_experiment(f, k_schedule, ext: ExtendedGrid, s: float, V_inner: Potential | None = None,
                          check_L: bool = True) -> WellReport:
    """Finite wells along ``k_schedule`` against the Dirichlet solution in ``Omega``.

    Reports ``||u_k - u_D||_{L1(Omega)}``, the exterior mass and ``k`` times
    that mass. With ``check_L`` the problem is re-solved on a grid with ``L``
    doubled and the largest relative change of ``||u_k||_{L1(Omega)}`` over
    the schedule is recorded.
    """
    s = check_order(s)
    if V_inner is None:
        V_inner = Potential.power(1.0, 2.0 * s)
    fin = _inner_values(f, ext)
    inner = ext.inner
    A_in = assemble_galerkin(inner, s)
    Vd = V_inner.on_grid(inner)
    uD = (A_in.shifted(Vd) if np.any(Vd) else A_in).solve(A_in.mass * fin)
    w = Weight()
    gaps, masses, ratios, dom = [], [], [], []
    prev = None
    monotone = True
    sols = []
    for k in k_schedule:
        u = whole_space_solve(V_inner, k, fin, ext, s).values
        sols.append(u)
        ui = u[ext.inner_index]
        gaps.append(weighted_norm(ui - uD, w, 1, inner))
        m = ext.exterior_integral(u)
        masses.append(m)
        ratios.append(k * m)
        dom.append(float((ui - uD).min()))
        if prev is not None and np.any(u > prev + 1e-12 * np.abs(prev).max()):
            monotone = False
        prev = u
    change = None
    if check_L:
        big = ext.doubled()
        change = 0.0
        for k, u in zip(k_schedule, sols):
            u2 = whole_space_solve(V_inner, k, fin, big, s).values
            n1 = weighted_norm(u[ext.inner_index], w, 1, inner)
            n2 = weighted_norm(u2[big.inner_index], w, 1, inner)
            change = max(change, abs(n2 - n1) / n1)
    return WellReport(list(k_schedule), gaps, masses, ratios, dom, monotone, change,
                      weighted_norm(uD, w, 1, inner))
