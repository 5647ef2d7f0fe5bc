"""Registry of reproducible experiments.

Each experiment takes a parameter dict (defaults below, overridden by the
configuration file or the command line), runs a batch of solves and returns
an :class:`ExperimentResult` holding named checks and tables. Default
parameters are the acceptance settings.
"""

from __future__ import annotations

import csv
import io
import json
import math
import shlex
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .flatness import (blowup_experiment, fit_boundary_exponent, hopf_constant, large_solution_residual,
                       power_log_integrable, super_singular_experiment, torsion_residual,
                       trace_equivalence_experiment, verify_flatness)
from .grid import BallDomain, GapData, GridFunction, Weight, build_graded_grid, default_grading, weighted_norm
from .greens import cell_averages, green_solve, phi_delta, verify_kernel_bounds
from .operator import assemble_galerkin, eilertsen_terms, pointwise_laplacian, solve_dirichlet
from .schrodinger import (Potential, Spike, build_battery, counterexample_experiment, kato_margins,
                          resolvent_margins, solve, solve_truncated, stroock_varopoulos_margin)
from .special import gamma_beta, torsion_constant
from .well import build_extended_grid, well_limit_experiment

__all__ = [
    "Check",
    "Table",
    "ExperimentResult",
    "Experiment",
    "REGISTRY",
    "experiment_names",
    "run_experiment",
    "parse_data",
    "write_outputs",
    "write_summary",
    "BASE_DEFAULTS",
]


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class Check:
    """One pass/fail comparison ``value <relation> threshold``."""

    label: str
    value: float
    threshold: float
    relation: str

    @property
    def passed(self) -> bool:
        v, t = self.value, self.threshold
        if isinstance(v, float) and math.isnan(v):
            return False
        return {"<=": v <= t, ">=": v >= t, "<": v < t, ">": v > t, "==": v == t}[self.relation]

    def as_dict(self) -> dict:
        return {"label": self.label, "value": _jsonable(self.value), "threshold": _jsonable(self.threshold),
                "relation": self.relation, "passed": bool(self.passed)}


@dataclass
class Table:
    """Rows for a CSV table (``kind='csv'``) or a gnuplot data file (``kind='dat'``)."""

    tag: str
    columns: list
    rows: list = field(default_factory=list)
    s: float | None = None
    kind: str = "csv"

    def add(self, *row):
        self.rows.append(list(row))


@dataclass
class ExperimentResult:
    name: str
    anchor: str
    params: dict
    checks: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def check(self, label, value, relation, threshold) -> Check:
        c = Check(label, float(value) if not isinstance(value, bool) else float(value), float(threshold), relation)
        self.checks.append(c)
        return c

    def table(self, tag, columns, s=None, kind="csv") -> Table:
        t = Table(tag, list(columns), [], s, kind)
        self.tables.append(t)
        return t

    def failed(self) -> list:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> dict:
        return {
            "experiment": self.name,
            "anchor": self.anchor,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "constants": {k: _jsonable(v) for k, v in self.constants.items()},
            "tolerances": {k: _jsonable(v) for k, v in self.params.items() if k.startswith("tol")},
            "params": {k: _jsonable(v) for k, v in self.params.items()},
        }


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float):
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


# ---------------------------------------------------------------------------
# data specifications

_DATA = {
    "one": lambda x, d, R: np.ones_like(x),
    "bump": lambda x, d, R: np.exp(-20.0 * (x / R - 0.3) ** 2),
    "left": lambda x, d, R: (x < 0).astype(float),
    "ramp": lambda x, d, R: 1.0 + x / R,
    "cosine": lambda x, d, R: np.cos(5.0 * x / R),
    "x": lambda x, d, R: x / R,
    "sign": lambda x, d, R: np.sign(x),
    "sine": lambda x, d, R: np.sin(3.0 * x / R),
    "quadratic": lambda x, d, R: (x / R) ** 2 - 1.0 / 3.0,
}


def parse_data(spec: str):
    """Data from a specification string.

    ``"<id>"`` (one of the registered expressions), ``"const c"`` or
    ``"power a b"`` for ``delta^{-a} (1 + |log delta|)^{-b}``. Returns a
    callable ``f(x, delta, R)`` or a :class:`GapData`.
    """
    toks = shlex.split(spec)
    if not toks:
        raise ConfigurationError("empty data specification")
    head, rest = toks[0], toks[1:]
    try:
        if head in _DATA and not rest:
            return _DATA[head]
        if head == "const" and len(rest) == 1:
            c = float(rest[0])
            return lambda x, d, R: np.full_like(x, c)
        if head == "power" and len(rest) == 2:
            a, b = float(rest[0]), float(rest[1])
            return GapData(lambda d: d ** (-a) * (1.0 + np.abs(np.log(d))) ** (-b), spec)
    except ValueError as exc:
        raise ConfigurationError(f"bad number in data {spec!r}: {exc}") from exc
    raise ConfigurationError(f"cannot parse data {spec!r}; expected one of {sorted(_DATA)}, "
                             "'const c' or 'power a b'")


def _nodal(data, grid):
    if isinstance(data, GapData):
        return data.values(grid)
    return np.asarray(data(grid.nodes, grid.gaps, grid.half_width), dtype=float)


def _grading(p, s):
    return default_grading(s) if p.get("q") is None else float(p["q"])


def _s_list(p):
    s = p["s"]
    return [float(v) for v in (s if isinstance(s, (list, tuple)) else [s])]


def _rng(p, *stream):
    """Independent stream per purpose, derived from the declared seed."""
    ss = np.random.SeedSequence([int(p.get("seed", 0)), *stream])
    return np.random.Generator(np.random.PCG64DXSM(ss))


# ---------------------------------------------------------------------------
# experiments


def _torsion(p, res):
    R, N = float(p["R"]), int(p["N"])
    tol, dcut = p["tol"], p["interior"]
    t = res.table("errors", ["s", "method", "max_rel_error", "C"])
    res.check("C(s=1/2, R=1) equals 1", abs(torsion_constant(1, 0.5, 1.0) - 1.0), "<=", 2e-16)
    for s in _s_list(p):
        grid = build_graded_grid(R, N, _grading(p, s))
        C = torsion_constant(1, s, R)
        exact = C * (grid.gaps * (2 * R - grid.gaps)) ** s
        A = assemble_galerkin(grid, s)
        u = solve_dirichlet(A, np.ones(grid.size)).values
        inner = grid.gaps >= dcut * R
        e1 = float(np.max(np.abs(u[inner] / exact[inner] - 1)))
        ug = green_solve(GridFunction(grid, np.ones(grid.size)), s).values
        avg = cell_averages(grid, lambda x, d: C * (d * (2 * R - d)) ** s)
        e2 = float(np.max(np.abs(ug[inner] / avg[inner] - 1)))
        t.add(s, "galerkin", e1, C)
        t.add(s, "green", e2, C)
        res.check(f"s={s} galerkin interior error", e1, "<=", tol)
        res.check(f"s={s} green interior error", e2, "<=", tol)
        res.constants[f"C[s={s}]"] = C
        prof = res.table("profile", ["x", "u_galerkin", "u_green", "exact"], s=s, kind="dat")
        for i in range(0, grid.size, max(grid.size // 256, 1)):
            prof.add(grid.nodes[i], u[i], ug[i], exact[i])


def _gamma_beta(p, res):
    pairs = p.get("pairs")
    if p.get("beta") is not None:
        pairs = [(s, float(p["beta"])) for s in _s_list(p)]
    t = res.table("pv_vs_formula", ["s", "beta", "x", "pv", "formula", "rel_error"])
    for s, beta in pairs:
        g = gamma_beta(1, s, beta)
        worst = 0.0
        for x in p["points"]:
            r = pointwise_laplacian(lambda y: abs(y) ** beta, s, x, breakpoints=(0.0,), tail_power=beta)
            ex = g * abs(x) ** (beta - 2 * s)
            err = abs(r.value / ex - 1.0)
            worst = max(worst, err)
            t.add(s, beta, x, r.value, ex, err)
        res.check(f"s={s} beta={beta} PV vs formula", worst, "<=", p["tol"])
        if s < beta < 2 * s:
            res.check(f"s={s} beta={beta} gamma negative", g, "<", 0.0)
        res.constants[f"gamma[s={s},beta={beta}]"] = g
    d = res.table("divergence", ["s", "beta", "gamma", "gamma_times_gap"])
    for s in sorted({s for s, _ in pairs}):
        mags = []
        for j in range(1, 7):
            beta = 2 * s - 10.0**-j
            g = gamma_beta(1, s, beta)
            mags.append(abs(g))
            d.add(s, beta, g, g * (2 * s - beta))
        growth = min(b / a for a, b in zip(mags[:-1], mags[1:]))
        res.check(f"s={s} |gamma| grows as beta -> 2s (min ratio per decade)", growth, ">=", 5.0)


def _phi_delta_law(p, res):
    R, N = float(p["R"]), int(p["N"])
    t = res.table("ratios", ["s", "delta", "phi_delta", "ratio"])
    for s in _s_list(p):
        grid = build_graded_grid(R, N, _grading(p, s))
        phi = phi_delta(BallDomain(1, R), s, grid).values
        half = grid.nodes < 0
        d, v = grid.gaps[half], phi[half]
        ratios = []
        for j in range(p["j_min"], p["j_max"] + 1):
            dj = R * 2.0**-j
            val = math.exp(np.interp(math.log(dj), np.log(d), np.log(v)))
            r = val / (dj**s * (1 + abs(math.log(dj))))
            ratios.append(r)
            t.add(s, dj, val, r)
        band = max(ratios) / min(ratios)
        res.check(f"s={s} band C/c", band, "<=", p["tol_band"])
        res.check(f"s={s} lower constant positive", min(ratios), ">", 0.0)
        res.constants[f"band[s={s}]"] = (min(ratios), max(ratios))


def _green_bounds(p, res):
    t = res.table("bounds", ["s", "lower", "upper", "spread", "form"])
    for s in _s_list(p):
        rep = verify_kernel_bounds(BallDomain(int(p["n"]), float(p["R"])), s, int(p["samples"]), int(p["seed"]))
        t.add(s, rep.lower, rep.upper, rep.spread, rep.form)
        res.check(f"s={s} constants finite", float(np.isfinite(rep.lower) and np.isfinite(rep.upper)), "==", 1.0)
        res.check(f"s={s} spread C/c", rep.spread, "<", p["tol_spread"])
        res.constants[f"c,C[s={s}]"] = (rep.lower, rep.upper)


def _hopf(p, res):
    R = float(p["R"])
    t = res.table("constants", ["s", "data", "N", "hopf_constant"])
    for s in _s_list(p):
        data = {spec: parse_data(spec) for spec in p["data"]}
        consts = {spec: [] for spec in data}
        for N in p["sizes"]:
            grid = build_graded_grid(R, N, _grading(p, s))
            A = assemble_galerkin(grid, s)
            for name, d in data.items():
                f = _nodal(d, grid)
                u = solve_dirichlet(A, f)
                c = hopf_constant(u, f, s)
                consts[name].append(c)
                t.add(s, name, N, c)
                if name == p["data"][0] and N == p["sizes"][-1]:
                    c10 = hopf_constant(solve_dirichlet(A, 10 * f), 10 * f, s)
                    res.check(f"s={s} homogeneity under f -> 10 f", abs(c10 / c - 1), "<=", 1e-10)
        for name, cs in consts.items():
            res.check(f"s={s} {name}: constant positive", min(cs), ">", 0.0)
            res.check(f"s={s} {name}: max/min across N", max(cs) / min(cs), "<=", p["tol_stability"])


def _blowup(p, res):
    t = res.table("levels", ["s", "data", "k", "u_k(0)", "L1_norm"])
    for s in _s_list(p):
        sing = blowup_experiment(lambda d: d ** (-1.0 - s), s, p["levels"], int(p["N"]), p.get("q"),
                                 float(p["R"]), admissible=power_log_integrable(1.0, 0.0), min_ratio=p["tol_ratio"])
        ctrl = blowup_experiment(lambda d: d ** (-0.5 * s), s, p["levels"], int(p["N"]), p.get("q"),
                                 float(p["R"]), admissible=power_log_integrable(-0.5 * s, 0.0))
        for rep, name in ((sing, "delta^(-1-s)"), (ctrl, "delta^(-s/2)")):
            for k, c, n in zip(rep.levels, rep.center_values, rep.l1_norms):
                t.add(s, name, k, c, n)
        res.check(f"s={s} classifier: delta^(-1-s) not admissible", float(sing.admissible), "==", 0.0)
        res.check(f"s={s} min growth ratio per decade", min(sing.ratios), ">=", p["tol_ratio"])
        inc = np.asarray(sing.increments)
        res.check(f"s={s} no saturation (last/first increment)", inc[-1] / inc[0], ">=", 0.5)
        res.check(f"s={s} classifier: delta^(-s/2) admissible", float(ctrl.admissible), "==", 1.0)
        res.check(f"s={s} control converges (last/first increment)",
                  abs(ctrl.increments[-1]) / abs(ctrl.increments[0]), "<=", 0.1)


def _trace(p, res):
    t = res.table("verdicts", ["s", "a", "b", "classifier_finite", "norms", "stable", "agrees"])
    for s in _s_list(p):
        for a in (0.0, 1.0, 1.0 + s):
            for b in p["b_values"]:
                v = trace_equivalence_experiment(a, b, s, int(p["N"]), tuple(p["log_delta_mins"]), float(p["R"]))
                t.add(s, a, b, v.classifier_finite, " ".join(repr(float(x)) for x in v.norms), v.stable, v.agrees)
                res.check(f"s={s} a={a:g} b={b:g} classifier matches refinement", float(v.agrees), "==", 1.0)


def _kato_data(grid):
    R = grid.half_width
    return {name: _DATA[name](grid.nodes, grid.gaps, R) for name in ("x", "sine", "quadratic", "cosine", "sign")}


def _kato(p, res):
    t = res.table("margins", ["s", "potential", "data", "plain", "plus", "scale"])
    V = Potential.parse(p["potential"])
    for s in _s_list(p):
        grid = build_graded_grid(float(p["R"]), int(p["N"]), _grading(p, s))
        A = assemble_galerkin(grid, s)
        bat = build_battery(A)
        for name, g in _kato_data(grid).items():
            u = solve_dirichlet(A, g)
            m = kato_margins(u, g, bat)
            t.add(s, "zero", name, m["plain"], m["plus"], m["scale"])
            res.check(f"s={s} V=0 {name}: margin/scale", min(m["plain"], m["plus"]) / m["scale"], ">=", -p["tol"])
            rep = solve(V, g, A)
            geff = g - V.on_grid(grid) * rep.u.values
            m = kato_margins(rep.u, geff, bat)
            t.add(s, V.describe(), name, m["plain"], m["plus"], m["scale"])
            res.check(f"s={s} V={V.describe()} {name}: margin/scale",
                      min(m["plain"], m["plus"]) / m["scale"], ">=", -p["tol"])
            # uniqueness: a second run and the direct signed solve agree
            rep2 = solve(V, g, A)
            rep3 = solve(V, g, A, signed="direct")
            n = weighted_norm(rep.u.values, Weight(), 1, grid)
            d2 = weighted_norm(rep.u.values - rep2.u.values, Weight(), 1, grid) / n
            d3 = weighted_norm(rep.u.values - rep3.u.values, Weight(), 1, grid) / n
            res.check(f"s={s} {name}: repeated solves differ (L1, relative)", d2, "<=", p["tol_unique"])
            res.check(f"s={s} {name}: split vs direct signed solve (L1, relative)", d3, "<=", p["tol_unique"])


def _contraction(p, res):
    t = res.table("margins", ["s", "lambda", "potential", "weight", "plus", "plain", "scale"])
    for s in _s_list(p):
        grid = build_graded_grid(float(p["R"]), int(p["N"]), _grading(p, s))
        A = assemble_galerkin(grid, s)
        pots = [Potential.zero(), Potential.bounded("cosine"), Potential.power(1.0, 2.0 * s)]
        rng = _rng(p, 1, int(round(1000 * s)))
        for lam in p["lambdas"]:
            for V in pots:
                for w in ("one", "phi_1"):
                    for trial in range(int(p["trials"])):
                        f1 = rng.standard_normal(grid.size)
                        f2 = f1 - np.abs(rng.standard_normal(grid.size)) if trial == 0 else rng.standard_normal(grid.size)
                        m = resolvent_margins(lam, f1, f2, V, w, A)
                        t.add(s, lam, V.describe(), w, m["plus"], m["plain"], m["scale"])
                        tag = f"s={s} lambda={lam} V={V.describe()} w={w} trial={trial}"
                        res.check(f"{tag} plus-form margin/scale", m["plus"] / m["scale"], ">=", -p["tol"])
                        res.check(f"{tag} plain margin/scale", m["plain"] / m["scale"], ">=", -p["tol"])
        same = resolvent_margins(1.0, np.ones(grid.size), np.ones(grid.size), Potential.zero(), "one", A)
        res.check(f"s={s} equal data give zero margin", abs(same["plain"]) + abs(same["plus"]), "<=", 0.0)


def _stroock(p, res):
    t = res.table("margins", ["s", "p", "vector", "margin", "scale"])
    for s in _s_list(p):
        grid = build_graded_grid(float(p["R"]), int(p["N"]), _grading(p, s))
        A = assemble_galerkin(grid, s)
        rng = _rng(p, 2, int(round(1000 * s)))
        vecs = []
        for i in range(int(p["vectors"])):
            v = rng.standard_normal(grid.size)
            vecs.append(np.abs(v) if i % 2 == 0 else v)
        for pe in p["exponents"]:
            worst = math.inf
            for i, v in enumerate(vecs):
                m, sc = stroock_varopoulos_margin(v, pe, A, return_scale=True)
                t.add(s, pe, i, m, sc)
                worst = min(worst, m / sc)
            res.check(f"s={s} p={pe} worst margin/scale", worst, ">=", -p["tol"])


def _truncation(p, res):
    t = res.table("constants", ["s", "potential", "data", "N", "L1", "V_u_delta_s", "u_over_delta_s",
                                "V_u_phi_delta", "L2", "energy"])
    R = float(p["R"])
    for s in _s_list(p):
        pots = [Potential.power(1.0, 2.0 * s), Potential.bounded("cosine")]
        for V in pots:
            for dname in ("one", "bump"):
                consts = []
                for N in p["sizes"]:
                    grid = build_graded_grid(R, N, _grading(p, s))
                    A = assemble_galerkin(grid, s)
                    f = _DATA[dname](grid.nodes, grid.gaps, R)
                    rep = solve(V, f, A)
                    c = rep.constants
                    consts.append(c)
                    t.add(s, V.describe(), dname, N, c["L1"], c["V_u_delta_s"], c["u_over_delta_s"],
                          c["V_u_phi_delta"], c["L2"], c["energy"])
                    tag = f"s={s} V={V.describe()} f={dname} N={N}"
                    res.check(f"{tag} converged", float(rep.flags["converged"]), "==", 1.0)
                    res.check(f"{tag} positive", float(rep.flags["positive"]), "==", 1.0)
                    res.check(f"{tag} ||u/delta^s|| / ||f phi_delta||", c["u_over_delta_s"], "<=", 1.0 + p["tol_pair"])
                    res.check(f"{tag} ||V u phi_delta|| / ||f phi_delta||", c["V_u_phi_delta"], "<=", 1.0 + p["tol_pair"])
                    if N == p["sizes"][0]:
                        _monotonicity(V, f, A, p, res, tag)
                for key in ("L1", "V_u_delta_s", "u_over_delta_s", "V_u_phi_delta"):
                    a, b = consts[0][key], consts[-1][key]
                    res.check(f"s={s} V={V.describe()} f={dname} {key} stable under doubling",
                              abs(b / a - 1), "<=", p["tol_stable"])


def _monotonicity(V, f, A, p, res, tag):
    ks = [1.0, 4.0, 16.0, 64.0, 256.0]
    mbig = max(float(np.max(f)), 1.0)
    us = [solve_truncated(V, f, k, mbig, A).values for k in ks]
    scale = max(np.abs(u).max() for u in us)
    worst = max(float(np.max(b - a)) for a, b in zip(us[:-1], us[1:]))
    res.check(f"{tag} nonincreasing in k (max increase/scale)", worst / scale, "<=", p["tol_monotone"])
    fs = f * 50.0
    ms = [1.0, 4.0, 16.0, 64.0]
    us = [solve_truncated(V, fs, 16.0, m, A).values for m in ms]
    scale = max(np.abs(u).max() for u in us)
    worst = max(float(np.max(a - b)) for a, b in zip(us[:-1], us[1:]))
    res.check(f"{tag} nondecreasing in m (max decrease/scale)", worst / scale, "<=", p["tol_monotone"])


def _flatness(p, res):
    t = res.table("barrier", ["s", "eps", "C_V", "bound", "max_ratio", "exponent", "exponent_control"])
    R, N = float(p["R"]), int(p["N"])
    for s in _s_list(p):
        eps = p["eps_fraction"] * s
        C_V = 2.0 * abs(gamma_beta(1, s, s + eps))
        grid = build_graded_grid(R, N, _grading(p, s))
        A = assemble_galerkin(grid, s)
        V = Potential.power(C_V, 2.0 * s)
        f = np.ones(grid.size)
        rep = solve(V, f, A)
        fr = verify_flatness(V, f, eps, rep)
        ctrl = fit_boundary_exponent(solve(Potential.zero(), f, A).u)
        t.add(s, eps, C_V, fr.bound, fr.max_ratio, fr.fit.exponent, ctrl.exponent)
        res.check(f"s={s} converged", float(rep.flags["converged"]), "==", 1.0)
        res.check(f"s={s} u/delta^s finite", float(rep.flags["u_over_delta_finite"]), "==", 1.0)
        res.check(f"s={s} max u/delta^(s+eps) / barrier", fr.max_ratio / fr.bound, "<=", 1.0 + p["tol_barrier"])
        res.check(f"s={s} fitted exponent - (s + eps/2)", fr.fit.exponent - (s + 0.5 * eps), ">=", 0.0)
        res.check(f"s={s} control exponent |alpha - s|", abs(ctrl.exponent - s), "<=", p["tol_control"])
        res.constants[f"barrier[s={s}]"] = fr.bound
        prof = res.table("ratio_profile", ["delta", "u_over_delta_s_eps"], s=s, kind="dat")
        half = grid.nodes < 0
        for d, u in zip(grid.gaps[half][:: max(1, half.sum() // 200)], rep.u.values[half][:: max(1, half.sum() // 200)]):
            prof.add(d, u / d ** (s + eps))
    _super_singular(p, res)


def _super_singular(p, res):
    t = res.table("super_singular", ["s", "delta_min", "ratio_with_V", "ratio_without_V"])
    for s in _s_list(p):
        rep = super_singular_experiment(s, float(p["ss_C_V"]), float(p["ss_b"]), int(p["N"]),
                                        tuple(p["log_delta_mins"]), float(p["R"]), p["tol_ss"])
        for d, r, c in zip(rep.delta_mins, rep.ratios, rep.control):
            t.add(s, d, r, c)
        res.check(f"super-singular s={s} f delta^s integrable", float(power_log_integrable(1.0, rep.b)), "==", 1.0)
        res.check(f"super-singular s={s} f phi_delta not integrable", float(power_log_integrable(1.0, rep.b - 1.0)), "==", 0.0)
        res.check(f"super-singular s={s} largest relative change with V", max(rep.changes), "<=", p["tol_ss"])
        res.check(f"super-singular s={s} smallest growth without V", min(rep.control_growth), ">=", 1.0 + p["tol_ss"])


def _large(p, res):
    t = res.table("residuals", ["s", "large_solution_residual", "torsion_min", "torsion_max"])
    for s in _s_list(p):
        r = large_solution_residual(s, p["points"], float(p["R"]))
        tv = torsion_residual(s, p["points"], float(p["R"]))
        t.add(s, r, tv.min(), tv.max())
        res.check(f"s={s} large solution residual / scale", r, "<=", p["tol"])
        res.check(f"s={s} torsion value away from zero", float(np.min(np.abs(tv))), ">=", 0.5)


def _well(p, res):
    t = res.table("well", ["s", "potential", "k", "L1_gap", "exterior_mass", "ratio_k_times_mass"])
    R = float(p["R"])
    for s in _s_list(p):
        inner = build_graded_grid(R, int(p["N"]), float(p.get("q") or 2.0))
        L = p["L_factor"] * R
        ext = build_extended_grid(inner, L, int(p["outer_per_R"] * L / R), 2.0)
        for V in (Potential.power(1.0, 2.0 * s), Potential.zero()):
            rep = well_limit_experiment(lambda x: np.ones_like(x), p["k_schedule"], ext, s, V,
                                        check_L=not V.is_zero)
            for row in rep.rows():
                t.add(s, V.describe(), *row)
            tag = f"s={s} V={V.describe()}"
            res.check(f"{tag} L1 gap strictly decreasing", float(rep.gap_decreasing), "==", 1.0)
            res.check(f"{tag} nonincreasing in k", float(rep.monotone_in_k), "==", 1.0)
            res.check(f"{tag} u_k >= u_D (worst, relative)", min(rep.min_dominance) / rep.dirichlet_norm,
                      ">=", -1e-10)
            spread = rep.fitted_constant_spread(len(rep.k) - 1)
            res.check(f"{tag} k * exterior mass spread (k >= {rep.k[1]:g})", spread, "<=", p["tol_spread"])
            if rep.l_doubling_change is not None:
                res.check(f"{tag} L-doubling change", rep.l_doubling_change, "<", p["tol_L"])
            res.constants[f"C[{tag}]"] = rep.ratio_k_times_mass[-1]


def _counterexample(p, res):
    t = res.table("refinement", ["s", "N", "Vu_Lq_norm", "min_u2_on_ball"])
    for s in _s_list(p):
        sp = Spike(p["amplitude"], p["exponent"], p["center"], p["radius"])
        rep = counterexample_experiment(s, Potential.parse(p["potential"]), sp, p["q_exp"], p["p_exp"],
                                        sizes=tuple(p["sizes"]), R=float(p["R"]), min_growth=p["tol_growth"])
        for N, nrm, mn in zip(rep.sizes, rep.lq_norms, rep.min_u2_on_ball):
            t.add(s, N, nrm, mn)
        res.check(f"s={s} smallest growth per doubling", min(rep.growth), ">=", p["tol_growth"])
        res.check(f"s={s} min u2 on ball / (c0/4)", min(rep.min_u2_on_ball) / (rep.c0 / 4), ">=", 1.0)
        res.constants[f"c0[s={s}]"] = rep.c0


_PAIRS = {
    "gauss-shifted": (lambda y: math.exp(-y * y), lambda y: math.exp(-(y - 0.5) ** 2)),
    "gauss-widths": (lambda y: math.exp(-0.5 * y * y), lambda y: math.exp(-2.0 * y * y)),
}


def _eilertsen(p, res):
    t = res.table("residuals", ["s", "pair", "x", "residual", "scale"])
    for s in _s_list(p):
        for name, (u, v) in _PAIRS.items():
            for x in p["points"]:
                terms = eilertsen_terms(u, v, s, x, breakpoints=(), support=(-40.0, 40.0))
                t.add(s, name, x, terms["residual"], terms["scale"])
                res.check(f"s={s} {name} x={x} residual/scale", abs(terms["residual"]) / terms["scale"], "<=", p["tol"])


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    func: object
    defaults: dict

    def run(self, params: dict | None = None) -> ExperimentResult:
        p = dict(BASE_DEFAULTS)
        p.update(self.defaults)
        if params:
            unknown = set(params) - set(p) - {"output", "experiments", "workers"}
            if unknown:
                raise ConfigurationError(f"unknown parameters for {self.name}: {sorted(unknown)}")
            p.update({k: v for k, v in params.items() if v is not None})
        res = ExperimentResult(self.name, self.anchor, p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            self.func(p, res)
        return res


BASE_DEFAULTS = {"s": [0.25, 0.5, 0.75], "R": 1.0, "n": 1, "N": 2048, "q": None, "seed": 0,
                 "potential": "bounded cosine"}

_SPECS = [
    ("torsion", "(-Delta)^s C(R^2-|x|^2)^s = 1 with C = Gamma(n/2)/(4^s Gamma(1+s) Gamma(n/2+s))", _torsion,
     {"q": 4.0, "tol": 0.01, "interior": 0.05}),
    ("gamma-beta", "(-Delta)^s |x|^beta = gamma_beta |x|^(beta-2s); gamma_beta < 0 for s < beta < 2s", _gamma_beta,
     {"pairs": [(0.5, 0.6), (0.5, 0.75), (0.25, 0.3)], "beta": None, "points": [0.5, 1.0, 2.0, -1.5, 3.0],
      "tol": 1e-4}),
    ("green-bounds", "G(x,y) comparable to |x-y|^(2s-n) min(1, d(x)^s d(y)^s / |x-y|^(2s))", _green_bounds,
     {"samples": 10_000, "tol_spread": 100.0}),
    ("phi-delta-law", "c delta^s |log delta| <= phi_delta <= C delta^s (1 + |log delta|)", _phi_delta_law,
     {"j_min": 3, "j_max": 12, "tol_band": 20.0}),
    ("hopf", "u >= c delta^s int f delta^s for f >= 0", _hopf,
     {"sizes": [512, 1024, 2048], "data": ["one", "left", "bump", "ramp", "power 0.25 0"],
      "tol_stability": 2.0}),
    ("blowup", "f delta^s not integrable: u_k = G(min(f, k)) -> infinity", _blowup,
     {"levels": [10.0, 1e2, 1e3, 1e4], "tol_ratio": 1.2}),
    ("trace-equivalence", "V = 0: u/delta^s in L1 iff f delta^s (1 + |log delta|) in L1", _trace,
     {"s": [0.5], "b_values": [1.25, 2.0, 3.0], "log_delta_mins": [-4.0, -8.0, -16.0]}),
    ("kato", "(-Delta)^s |u| <= sign(u) (-Delta)^s u in the dual sense; uniqueness", _kato,
     {"s": [0.5], "N": 1024, "tol": 1e-8, "tol_unique": 1e-10}),
    ("contraction", "||(u1-u2)+|| <= ||(f1-f2)+|| for u + lambda((-Delta)^s + V) u = f", _contraction,
     {"s": [0.5], "N": 1024, "lambdas": [0.1, 1.0, 10.0], "trials": 2, "tol": 1e-10}),
    ("stroock-varopoulos", "<|v|^(p-2) v, A v> >= 4(p-1)/p^2 <A |v|^(p/2), |v|^(p/2)>", _stroock,
     {"N": 512, "exponents": [1.5, 2.0, 3.0], "vectors": 20, "tol": 1e-8}),
    ("schrodinger-truncation", "V_k = min(V, k) decreasing, f_m = min(f, m) increasing; weighted L1 estimates",
     _truncation, {"s": [0.5], "sizes": [1024, 2048], "tol_pair": 0.02, "tol_stable": 0.05,
                   "tol_monotone": 1e-10}),
    ("flatness-barrier", "V >= C_V delta^(-2s), C_V > -gamma_(s+eps): u/delta^(s+eps) bounded; "
     "V >= C delta^(-2s): u/delta^s in L1 even when f phi_delta is not", _flatness,
     {"eps_fraction": 0.5, "tol_barrier": 0.05, "tol_control": 0.05,
      "ss_C_V": 1.0, "ss_b": 2.0, "log_delta_mins": [-4.0, -8.0, -16.0], "tol_ss": 0.05}),
    ("large-solution", "(-Delta)^s (1-|x|^2)^(s-1) = 0 pointwise in the ball", _large,
     {"s": [0.5, 0.75], "points": [0.0, 0.3, -0.5, 0.7, 0.85], "tol": 1e-4}),
    ("counterexample", "V2 = V1 + g with g in L^p but not L^q: V2 u2 not in L^q", _counterexample,
     {"s": [0.5], "potential": "bounded bump", "amplitude": 0.05, "exponent": 0.9, "center": 0.0,
      "radius": 0.25, "q_exp": 16.0, "p_exp": 1.1, "sizes": [256, 512, 1024, 2048], "tol_growth": 1.5}),
    ("infinite-well", "u_k solving with min(k, V) on the line converge to the Dirichlet solution in Omega", _well,
     {"s": [0.5], "N": 512, "q": 2.0, "L_factor": 8.0, "outer_per_R": 64, "k_schedule": [1.0, 10.0, 100.0, 1000.0],
      "tol_spread": 1.1, "tol_L": 1e-3}),
    ("eilertsen", "(-Delta)^s(uv) = u(-Delta)^s v + v(-Delta)^s u - c int (u(x)-u(y))(v(x)-v(y))|x-y|^(-n-2s) dy",
     _eilertsen, {"points": [0.0, 0.3, 1.0], "tol": 1e-6}),
]

REGISTRY = {name: Experiment(name, anchor, func, defaults) for name, anchor, func, defaults in _SPECS}


def experiment_names() -> list:
    return list(REGISTRY)


def run_experiment(name: str, params: dict | None = None) -> ExperimentResult:
    if name not in REGISTRY:
        raise ConfigurationError(f"unknown experiment {name!r}; valid names: {', '.join(REGISTRY)}")
    return REGISTRY[name].run(params)


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _stag(t: Table, res: ExperimentResult) -> str:
    if t.s is not None:
        return f"{t.s:g}"
    ss = _s_list(res.params) if "s" in res.params else []
    return f"{ss[0]:g}" if len(ss) == 1 else "all"


def write_outputs(res: ExperimentResult, outdir) -> list:
    """Write the tables of a result; returns the paths written.

    CSV files are named ``<experiment>_<s>_<tag>.csv`` and start with a
    comment line naming the statement under test; ``kind='dat'`` tables go
    to whitespace-separated ``.dat`` files for gnuplot.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for t in res.tables:
        stem = f"{res.name}_{_stag(t, res)}_{t.tag}"
        if t.kind == "dat":
            lines = [f"# {res.name}: {res.anchor}", "# " + " ".join(t.columns)]
            lines += [" ".join(_fmt(v) for v in row) for row in t.rows]
            path = out / f"{stem}.dat"
            path.write_text("\n".join(lines) + "\n")
        else:
            buf = io.StringIO()
            buf.write(f"# {res.name}: {res.anchor}\n")
            w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
            w.writerow(t.columns)
            for row in t.rows:
                w.writerow([_fmt(v) for v in row])
            path = out / f"{stem}.csv"
            path.write_text(buf.getvalue())
        paths.append(path)
    return paths


def write_summary(results, outdir) -> Path:
    path = Path(outdir) / "summary.json"
    path.write_text(json.dumps({"passed": all(r.passed for r in results),
                                "experiments": [r.summary() for r in results]}, indent=2, sort_keys=True) + "\n")
    return path
