"""Fractional Schrodinger problems ``(-Delta)^s u + V u = f`` with nonnegative potentials.

Solutions are built by the double truncation ``V_k = min(V, k)``,
``f_m = min(f+, m) - min(f-, m)`` with ``k = m = 1, 2, 4, ...`` on the Galerkin
matrix of :mod:`fraclab.operator`. Because that matrix has the M-matrix sign
pattern, the discrete versions of Kato's inequality, T-accretivity and the
Stroock-Varopoulos inequality hold exactly; the margin functions below
measure them.
"""

from __future__ import annotations

import math
import shlex
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import ConfigurationError, MatrixInvariantError, PreconditionError
from .grid import (GapData, GridFunction, Mesh1D, Weight, build_graded_grid, cell_integrals,
                   weighted_norm)
from .greens import green_matrix
from .operator import OperatorMatrix, assemble_galerkin, eigenpair

__all__ = [
    "Potential",
    "BOUNDED_EXPRESSIONS",
    "SolveReport",
    "TestBattery",
    "build_battery",
    "solve_truncated",
    "solve",
    "galerkin_phi_delta",
    "very_weak_residual",
    "kato_margin",
    "kato_margins",
    "resolvent_contraction_margin",
    "resolvent_margins",
    "stroock_varopoulos_margin",
    "Spike",
    "CounterexampleReport",
    "counterexample_experiment",
]


# ---------------------------------------------------------------------------
# potentials

BOUNDED_EXPRESSIONS = {
    "zero": lambda x, d, R: np.zeros_like(x),
    "one": lambda x, d, R: np.ones_like(x),
    "quadratic": lambda x, d, R: (x / R) ** 2,
    "cosine": lambda x, d, R: 1.0 + np.cos(np.pi * x / R),
    "bump": lambda x, d, R: np.exp(-8.0 * (x / R) ** 2),
    "step": lambda x, d, R: (x > 0).astype(float),
    "ramp": lambda x, d, R: 1.0 + x / R,
}

_KINDS = ("bounded", "power_singular", "poschl_teller", "tabulated", "infinite_well")


@dataclass(frozen=True, eq=False)
class Potential:
    """Nonnegative potential, evaluated at grid nodes.

    Use the constructors :meth:`bounded`, :meth:`power`, :meth:`poschl`,
    :meth:`tabulated`, :meth:`well`, or :meth:`parse` for the text grammar
    ``"power C_V p"``, ``"poschl V0 alpha k mu"``, ``"bounded <expr-id>"``,
    ``"well <inner spec>"``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    func: object = None
    inner: "Potential | None" = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown potential kind {self.kind!r}")

    # constructors
    @classmethod
    def zero(cls) -> "Potential":
        return cls.bounded("zero")

    @classmethod
    def bounded(cls, func="zero", name=None) -> "Potential":
        if isinstance(func, str):
            if func not in BOUNDED_EXPRESSIONS:
                raise ConfigurationError(
                    f"unknown bounded expression {func!r}; known: {sorted(BOUNDED_EXPRESSIONS)}")
            return cls("bounded", {"expr": func}, BOUNDED_EXPRESSIONS[func])
        return cls("bounded", {"expr": name or getattr(func, "__name__", "callable")}, func)

    @classmethod
    def power(cls, C_V: float, p: float) -> "Potential":
        if not (C_V >= 0 and p >= 0):
            raise ConfigurationError("power potential needs C_V >= 0 and p >= 0")
        return cls("power_singular", {"C_V": float(C_V), "p": float(p)})

    @classmethod
    def poschl(cls, V0: float, alpha: float, k: float, mu: float) -> "Potential":
        if V0 < 0 or k * (k - 1) < 0 or mu * (mu - 1) < 0:
            raise ConfigurationError("Poschl-Teller parameters give a negative potential")
        return cls("poschl_teller", {"V0": float(V0), "alpha": float(alpha), "k": float(k), "mu": float(mu)})

    @classmethod
    def tabulated(cls, values) -> "Potential":
        v = np.asarray(getattr(values, "values", values), dtype=float)
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ConfigurationError("tabulated potential must be finite and nonnegative")
        return cls("tabulated", {}, v)

    @classmethod
    def well(cls, inner: "Potential | None" = None) -> "Potential":
        return cls("infinite_well", {}, None, inner or cls.zero())

    @classmethod
    def parse(cls, spec: str) -> "Potential":
        toks = shlex.split(spec)
        if not toks:
            raise ConfigurationError("empty potential specification")
        head, rest = toks[0], toks[1:]
        try:
            if head == "power" and len(rest) == 2:
                return cls.power(float(rest[0]), float(rest[1]))
            if head == "poschl" and len(rest) == 4:
                return cls.poschl(*map(float, rest))
            if head == "bounded" and len(rest) == 1:
                return cls.bounded(rest[0])
            if head == "well":
                return cls.well(cls.parse(" ".join(rest)) if rest else None)
            if head in ("zero", "none") and not rest:
                return cls.zero()
        except ValueError as exc:
            raise ConfigurationError(f"bad number in potential {spec!r}: {exc}") from exc
        raise ConfigurationError(
            f"cannot parse potential {spec!r}; expected 'power C_V p', 'poschl V0 alpha k mu', "
            "'bounded <expr-id>' or 'well <inner>'")

    def describe(self) -> str:
        if self.kind == "bounded":
            return f"bounded {self.params['expr']}"
        if self.kind == "power_singular":
            return f"power {self.params['C_V']!r} {self.params['p']!r}"
        if self.kind == "poschl_teller":
            p = self.params
            return f"poschl {p['V0']!r} {p['alpha']!r} {p['k']!r} {p['mu']!r}"
        if self.kind == "infinite_well":
            return f"well {self.inner.describe()}"
        return "tabulated"

    @property
    def is_zero(self) -> bool:
        return self.kind == "bounded" and self.params.get("expr") == "zero"

    def evaluate(self, x, delta, R: float = 1.0) -> np.ndarray:
        """Values at points ``x`` with boundary distances ``delta`` (exact)."""
        x = np.asarray(x, dtype=float)
        delta = np.asarray(delta, dtype=float)
        if self.kind == "bounded":
            v = np.broadcast_to(np.asarray(self.func(x, delta, R), dtype=float), x.shape).copy()
        elif self.kind == "power_singular":
            p = self.params
            v = p["C_V"] * delta ** (-p["p"]) if p["p"] > 0 else np.full(x.shape, p["C_V"])
        elif self.kind == "poschl_teller":
            p = self.params
            a = p["alpha"] * np.abs(x)
            with np.errstate(divide="ignore"):
                v = 0.5 * p["V0"] * (p["k"] * (p["k"] - 1) / np.sin(a) ** 2 + p["mu"] * (p["mu"] - 1) / np.cos(a) ** 2)
        elif self.kind == "tabulated":
            if self.func.shape != x.shape:
                raise ConfigurationError("tabulated potential does not match the grid")
            v = self.func.copy()
        else:
            v = self.inner.evaluate(x, delta, R)
        if np.any(v < 0) or np.any(np.isnan(v)):
            raise PreconditionError("potential must be nonnegative wherever evaluated")
        return v

    def on_grid(self, grid: Mesh1D) -> np.ndarray:
        return self.evaluate(grid.nodes, grid.gaps, grid.half_width)


def _values(f, grid=None):
    if isinstance(f, GapData):
        return f.values(grid)
    return np.asarray(getattr(f, "values", f), dtype=float)


def _load(f, grid, m):
    """Right-hand side ``M f_m`` (nodal data) or exact hat integrals (:class:`GapData`).

    ``m = None`` means no truncation.
    """
    if isinstance(f, GapData):
        return f.hat_load(grid, m)
    fv = _values(f)
    return grid.mass * (fv if m is None else _truncate_data(fv, m))


def _increment(u, prev, Vvals, grid, s, tol):
    """Increments in L1 and in the ``V u delta^s`` norm, and whether both are below ``tol``."""
    dl1 = weighted_norm(u - prev, Weight(), 1, grid)
    dv = weighted_norm(Vvals * (u - prev), Weight.delta_s(s), 1, grid)
    nl1 = weighted_norm(u, Weight(), 1, grid)
    nv = weighted_norm(Vvals * u, Weight.delta_s(s), 1, grid)
    return dl1, dv, dl1 <= tol * max(nl1, 1e-300) and dv <= tol * max(nv, 1e-300)


# ---------------------------------------------------------------------------
# solves


def _truncate_data(f, m):
    fp, fm = np.maximum(f, 0.0), np.maximum(-f, 0.0)
    return np.minimum(fp, m) - np.minimum(fm, m)


def solve_truncated(V: Potential, f, k: float, m: float, A: OperatorMatrix) -> GridFunction:
    """Solve ``(A + M diag(min(V, k))) u = M f_m`` with truncated data ``f_m``.

    ``f`` may be nodal (GridFunction or array) or a :class:`GapData`, whose
    truncated load is integrated exactly against the hat functions.
    """
    if k < 1 or m < 1:
        raise ConfigurationError("truncation levels must be >= 1")
    Vk = np.minimum(V.on_grid(A.grid), k)
    B = A.shifted(Vk) if np.any(Vk) else A
    u = B.solve(_load(f, A.grid, m))
    return GridFunction(A.grid, u, {"s": A.s, "k": k, "m": m})


def galerkin_phi_delta(A: OperatorMatrix) -> np.ndarray:
    """Discrete ``phi_delta``: ``A phi = b`` with ``b_i`` the exact cell integral of ``delta^{-s}``.

    With this load, ``||u/delta^s||`` measured by exact cell integrals pairs
    with ``phi`` exactly, so the discrete weighted estimates inherit constant 1.
    """
    cache = A.__dict__.setdefault("_cache", {})
    if "phi_delta" not in cache:
        b = cell_integrals(A.grid, -A.s)
        cache["phi_delta"] = A.solve(b)
    return cache["phi_delta"]


@dataclass(eq=False)
class SolveReport:
    """Outcome of :func:`solve`."""

    u: GridFunction
    norms: dict
    data_norms: dict
    constants: dict
    truncation_history: list
    flags: dict
    potential: str = ""


def _norms(A: OperatorMatrix, u, Vvals, f):
    grid, s = A.grid, A.s
    phi = galerkin_phi_delta(A)
    au = np.abs(u)
    norms = {
        "L1": weighted_norm(au, Weight(), 1, grid),
        "V_u_delta_s": weighted_norm(Vvals * au, Weight.delta_s(s), 1, grid),
        "u_over_delta_s": weighted_norm(au, Weight("delta_s", power=-s), 1, grid),
        "V_u_phi_delta": weighted_norm(Vvals * au, Weight("phi_delta", values=np.maximum(phi, 0)), 1, grid),
        "L2": weighted_norm(u, Weight(), 2, grid),
        "energy": A.energy(u),
    }
    fa = np.abs(f)
    data = {
        "f_delta_s": weighted_norm(fa, Weight.delta_s(s), 1, grid),
        "f_phi_delta": weighted_norm(fa, Weight("phi_delta", values=np.maximum(phi, 0)), 1, grid),
        "f_L2": weighted_norm(f, Weight(), 2, grid),
    }
    return norms, data


def solve(V: Potential, f, A: OperatorMatrix, tol: float = 1e-10, max_level: int = 200,
          signed: str = "split") -> SolveReport:
    """Very weak solution by simultaneous doubling of the truncation levels.

    Parameters
    ----------
    V : Potential
    f : GridFunction or ndarray
    A : OperatorMatrix
    tol : float
        Stop when consecutive iterates differ by less than ``tol`` relative in
        L1 and in the ``V u delta^s`` norm. The schedule is then completed
        in one step: the levels are raised past the nodal maxima of ``V`` and
        ``f``, which gives the untruncated discrete solution (last history
        entry, levels ``inf``).
    max_level : int
        Maximal number of doublings.
    signed : {"split", "direct"}
        Signed data are solved as ``f+`` and ``f-`` separately and subtracted
        (``split``) or in one linear solve (``direct``).

    Returns
    -------
    SolveReport
    """
    grid = A.grid
    fv = _values(f, grid)
    Vvals = V.on_grid(grid)
    if signed not in ("split", "direct"):
        raise ConfigurationError("signed must be 'split' or 'direct'")
    if isinstance(f, GapData):
        parts = [f] if signed == "direct" or np.all(fv >= 0) or np.all(fv <= 0) else [
            GapData(lambda d: np.maximum(f.func(d), 0.0)), GapData(lambda d: -np.maximum(-f.func(d), 0.0))]
    else:
        parts = [fv] if signed == "direct" or np.all(fv >= 0) or np.all(fv <= 0) else \
            [np.maximum(fv, 0.0), -np.maximum(-fv, 0.0)]
    history = []
    prev = None
    converged = False
    level = 1.0
    u = np.zeros_like(fv)
    if not np.any(fv):
        converged = True
    for it in range(max_level):
        if converged:
            break
        u = sum(solve_truncated(V, p, level, level, A).values for p in parts)
        if prev is not None:
            dl1, dv, small = _increment(u, prev, Vvals, grid, A.s, tol)
            history.append((level, level, dl1, dv))
            if small:
                converged = True
                break
        else:
            history.append((level, level, math.nan, math.nan))
        prev = u
        level *= 2.0
    if converged and np.any(fv):
        # continuing the schedule past the nodal maxima of V and f reaches the
        # untruncated discrete system: take that step directly
        B = A.shifted(Vvals) if np.any(Vvals) else A
        full = B.solve(sum(_load(p, grid, None) for p in parts))
        dl1, dv, _ = _increment(full, u, Vvals, grid, A.s, tol)
        history.append((math.inf, math.inf, dl1, dv))
        u = full
    norms, data = _norms(A, u, Vvals, fv)
    if isinstance(f, GapData):
        data["f_delta_s"] = f.weighted_integral(grid, A.s)
    consts = {}
    if data["f_delta_s"] > 0:
        consts["L1"] = norms["L1"] / data["f_delta_s"]
        consts["V_u_delta_s"] = norms["V_u_delta_s"] / data["f_delta_s"]
    if data["f_phi_delta"] > 0:
        consts["u_over_delta_s"] = norms["u_over_delta_s"] / data["f_phi_delta"]
        consts["V_u_phi_delta"] = norms["V_u_phi_delta"] / data["f_phi_delta"]
    if data["f_L2"] > 0:
        consts["L2"] = norms["L2"] / data["f_L2"]
        consts["energy"] = norms["energy"] / data["f_L2"] ** 2
    scale = max(np.abs(u).max(), 1e-300)
    flags = {
        "positive": bool(np.all(fv >= 0) and u.min() >= -1e-12 * scale),
        "converged": converged,
        "u_over_delta_finite": bool(np.isfinite(norms["u_over_delta_s"])),
    }
    return SolveReport(GridFunction(grid, u, {"s": A.s}), norms, data, consts, history, flags, V.describe())


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True, eq=False)
class TestBattery:
    """Pairs ``(phi, psi)`` with ``A phi = M psi``: discrete members of ``X^s``."""

    phis: np.ndarray
    psis: np.ndarray
    names: tuple

    __test__ = False  # not a pytest class

    def __len__(self):
        return len(self.names)

    @property
    def nonnegative(self) -> np.ndarray:
        return np.all(self.psis >= 0, axis=1)


def _battery_data(grid: Mesh1D):
    x = grid.nodes
    L = grid.half_width
    t = x / L
    data = {
        "one": np.ones_like(x),
        "x": t,
        "minus_x": -t,
        "x2": t**2,
        "parabola": 1.0 - t**2,
        "cosine": np.cos(0.5 * np.pi * t),
        "bump_left": np.exp(-30.0 * (t + 0.5) ** 2),
        "bump_center": np.exp(-30.0 * t**2),
        "bump_right": np.exp(-30.0 * (t - 0.5) ** 2),
        "sign": np.sign(t),
        "step": (t > 0).astype(float),
        "abs": np.abs(t),
    }
    return data


def build_battery(A: OperatorMatrix, names=None, method: str = "galerkin") -> TestBattery:
    """Test battery ``phi = G psi`` for bounded ``psi``.

    ``method='galerkin'`` uses the same matrix as the solver (the residual
    identity is then algebraic); ``method='green'`` uses the cell-averaged
    Green matrix and gives an independent cross-check.
    """
    data = _battery_data(A.grid)
    names = tuple(names) if names is not None else tuple(data)
    psis = np.array([data[n] for n in names])
    if method == "galerkin":
        phis = A.solve((A.mass[None, :] * psis).T).T
    elif method == "green":
        W = green_matrix(A.grid, A.s)
        phis = (W @ psis.T).T / A.grid.cell_widths[None, :]
    else:
        raise ConfigurationError(f"unknown battery method {method!r}")
    return TestBattery(np.atleast_2d(phis), np.atleast_2d(psis), names)


def very_weak_residual(report: SolveReport, V: Potential, f, battery: TestBattery) -> float:
    """Largest ``|int u psi + int V u phi - int f phi|`` over the battery, over ``||f delta^s||``."""
    if len(battery) == 0:
        raise ConfigurationError("battery is empty")
    grid = report.u.grid
    M = grid.mass
    u = report.u.values
    Vv = V.on_grid(grid)
    fv = _values(f)
    res = [abs(np.sum(M * u * psi) + np.sum(M * Vv * u * phi) - np.sum(M * fv * phi))
           for phi, psi in zip(battery.phis, battery.psis)]
    denom = weighted_norm(np.abs(fv), Weight.delta_s(grid_s(report)), 1, grid)
    return float(max(res) / denom) if denom > 0 else float(max(res))


def grid_s(report: SolveReport) -> float:
    return float(report.u.meta.get("s"))


def kato_margins(u, g, battery: TestBattery) -> dict:
    """Kato margins ``int sign(u) g phi - int |u| psi`` and the ``sign+`` variant.

    Minimum over the nonnegative battery members; returns ``plain``, ``plus``
    and ``scale`` (sum of the magnitudes of the compared integrals).
    """
    uv, gv = _values(u), _values(g)
    grid = u.grid if isinstance(u, GridFunction) else None
    M = grid.mass if grid is not None else np.ones_like(uv)
    sel = battery.nonnegative
    if not sel.any():
        raise ConfigurationError("battery has no nonnegative members")
    sg, sp = np.sign(uv), (uv > 0).astype(float)
    plain, plus, scale = [], [], 0.0
    for phi, psi in zip(battery.phis[sel], battery.psis[sel]):
        a = np.sum(M * sg * gv * phi)
        b = np.sum(M * np.abs(uv) * psi)
        c = np.sum(M * sp * gv * phi)
        d = np.sum(M * np.maximum(uv, 0.0) * psi)
        plain.append(a - b)
        plus.append(c - d)
        scale = max(scale, np.sum(M * np.abs(gv) * np.abs(phi)) + abs(b))
    return {"plain": float(min(plain)), "plus": float(min(plus)), "scale": float(scale)}


def kato_margin(u, g, battery: TestBattery) -> float:
    """Smaller of the two Kato margins; nonnegative certifies the inequality."""
    m = kato_margins(u, g, battery)
    return min(m["plain"], m["plus"])


def _weight_values(weight, A: OperatorMatrix):
    if isinstance(weight, str):
        weight = Weight(weight) if weight == "one" else None if weight != "phi_1" else "phi_1"
    if weight == "phi_1":
        cache = A.__dict__.setdefault("_cache", {})
        if "phi1" not in cache:
            cache["phi1"] = eigenpair(A).phi1.values
        return np.maximum(cache["phi1"], 0.0)
    if isinstance(weight, Weight):
        if weight.kind == "one":
            return np.ones(A.size)
        if weight.kind in ("phi_1", "phi_delta", "custom"):
            return weight.values
    raise ConfigurationError("contraction weights are 'one' or 'phi_1'")


def resolvent_margins(lam: float, f1, f2, V: Potential, weight, A: OperatorMatrix) -> dict:
    """Contraction margins for ``u + lam (A + V) u = f`` in a weighted L1 norm.

    Returns ``plus`` = ``||(f1-f2)+|| - ||(u1-u2)+||``, ``plain`` =
    ``||f1-f2|| - ||u1-u2||`` and ``scale`` = ``||f1-f2||``.
    """
    if not lam > 0:
        raise ConfigurationError("lambda must be positive")
    w = _weight_values(weight, A)
    Vv = V.on_grid(A.grid)
    M = A.mass
    B = A.entries * lam
    B[np.diag_indices_from(B)] += M * (1.0 + lam * Vv)
    from scipy.linalg import cho_factor, cho_solve

    fac = cho_factor(B)
    u1 = cho_solve(fac, M * _values(f1))
    u2 = cho_solve(fac, M * _values(f2))
    df, du = _values(f1) - _values(f2), u1 - u2
    nf = np.sum(M * w * np.abs(df))
    return {
        "plus": float(np.sum(M * w * np.maximum(df, 0)) - np.sum(M * w * np.maximum(du, 0))),
        "plain": float(nf - np.sum(M * w * np.abs(du))),
        "scale": float(nf),
    }


def resolvent_contraction_margin(lam: float, f1, f2, V: Potential, weight, A: OperatorMatrix) -> float:
    """T-accretivity margin ``||(f1-f2)+||_w - ||(u1-u2)+||_w`` (smaller of both forms)."""
    m = resolvent_margins(lam, f1, f2, V, weight, A)
    return min(m["plus"], m["plain"])


def _half_power(A: OperatorMatrix) -> np.ndarray:
    cache = A.__dict__.setdefault("_cache", {})
    if "sqrt" not in cache:
        lam, Q = eigh(A.entries)
        if lam.min() <= 0:
            raise MatrixInvariantError("stiffness matrix is not positive definite")
        cache["sqrt"] = (Q * np.sqrt(lam)) @ Q.T
    return cache["sqrt"]


def stroock_varopoulos_margin(v, p: float, A: OperatorMatrix, return_scale: bool = False):
    """``<|v|^{p-2} v, A v> - 4(p-1)/p^2 |A^{1/2} |v|^{p/2}|^2``; nonnegative certifies."""
    if not p > 1:
        raise ConfigurationError("exponent must exceed 1")
    vv = _values(v)
    w = np.abs(vv) ** (0.5 * p)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs_vec = np.where(vv != 0, np.abs(vv) ** (p - 2.0) * vv, 0.0)
    lhs = float(lhs_vec @ A.apply(vv))
    S = _half_power(A)
    Sw = S @ w
    rhs = 4.0 * (p - 1.0) / p**2 * float(Sw @ Sw)
    margin = lhs - rhs
    return (margin, abs(lhs) + abs(rhs)) if return_scale else margin


# ---------------------------------------------------------------------------
# counterexample


@dataclass(frozen=True)
class Spike:
    """Radial spike ``amplitude * |x - center|^{-exponent}`` on ``|x - center| < radius``."""

    amplitude: float
    exponent: float
    center: float = 0.0
    radius: float = 0.25

    def __call__(self, x):
        r = np.abs(np.asarray(x, dtype=float) - self.center)
        with np.errstate(divide="ignore"):
            return np.where(r < self.radius, self.amplitude * r ** (-self.exponent), 0.0)

    def lp_norm(self, p: float) -> float:
        """Exact ``L^p`` norm on the line (infinite when ``exponent * p >= 1``)."""
        ap = self.exponent * p
        if ap >= 1:
            return math.inf
        return self.amplitude * (2.0 * self.radius ** (1.0 - ap) / (1.0 - ap)) ** (1.0 / p)


@dataclass(eq=False)
class CounterexampleReport:
    sizes: list
    lq_norms: list
    growth: list
    c0: float
    min_u2_on_ball: list
    positivity_ok: bool
    p: float
    q: float
    min_growth: float = 1.5

    @property
    def success(self) -> bool:
        return self.positivity_ok and all(g >= self.min_growth for g in self.growth)


def counterexample_experiment(s: float, V1: Potential, spike: Spike, q: float, p: float = 1.05,
                              f=None, sizes=(256, 512, 1024, 2048), grading: float = 2.0,
                              radius_check: float | None = None, pnorm_cap: float = math.inf,
                              R: float = 1.0, min_growth: float = 1.5) -> CounterexampleReport:
    """Bounded data and potential, plus an unbounded spike in the potential.

    Solves ``(-Delta)^s u1 + V1 u1 = f`` and ``(-Delta)^s u2 + (V1 + g) u2 = f``
    over a sequence of grids and reports ``||(V1 + g) u2||_{L^q}`` together
    with the check ``u2 >= c0/4`` on the spike ball, ``c0 = u1(x0)``.
    Smallness of the spike in ``L^p`` is certified by that check rather
    than by a fixed norm cap (``pnorm_cap`` is optional).
    """
    if not (p > 1 and q > p):
        raise ConfigurationError("need 1 < p < q")
    if spike.lp_norm(p) > pnorm_cap:
        raise ConfigurationError(f"spike L^{p} norm {spike.lp_norm(p):.3g} exceeds the cap {pnorm_cap}")
    if spike.exponent * q < 1:
        raise ConfigurationError("spike must fail to be in L^q near its center")
    if f is None:
        f = lambda x: np.exp(-4.0 * (x / R) ** 2)  # noqa: E731
    rc = spike.radius if radius_check is None else radius_check
    norms, mins = [], []
    c0 = math.nan
    for N in sizes:
        grid = build_graded_grid(R, N, grading)
        A = assemble_galerkin(grid, s)
        fv = f(grid.nodes)
        V1v = V1.on_grid(grid)
        u1 = A.shifted(V1v).solve(A.mass * fv) if np.any(V1v) else A.solve(A.mass * fv)
        V2v = V1v + spike(grid.nodes)
        u2 = A.shifted(V2v).solve(A.mass * fv)
        c0 = float(np.interp(spike.center, grid.nodes, u1))
        ball = np.abs(grid.nodes - spike.center) < rc
        mins.append(float(u2[ball].min()))
        norms.append(weighted_norm(V2v * u2, Weight(), q, grid))
    growth = [b / a for a, b in zip(norms[:-1], norms[1:])]
    ok = all(m >= c0 / 4.0 for m in mins)
    return CounterexampleReport(list(sizes), norms, growth, c0, mins, ok, p, q, min_growth)
