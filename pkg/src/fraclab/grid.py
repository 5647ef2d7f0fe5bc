"""Ball geometry, boundary-graded 1D grids, grid functions and weighted norms.

Points close to the ends of an interval are stored together with their exact
distance to the nearest end. With strong grading the first node sits at a
distance of order ``N**-q`` from the boundary, far below the resolution of the
coordinate itself, so every length below is computed from those distances.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import ConfigurationError

__all__ = [
    "BallDomain",
    "Mesh1D",
    "GradedGrid",
    "GridFunction",
    "Weight",
    "boundary_distance",
    "build_graded_grid",
    "default_grading",
    "pair_distance",
    "weighted_norm",
    "cell_integrals",
    "GapData",
]


@dataclass(frozen=True)
class BallDomain:
    """Ball of radius ``R`` centred at the origin of ``R^n``."""

    n: int = 1
    R: float = 1.0

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ConfigurationError(f"dimension must be 1, 2 or 3, got {self.n!r}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ConfigurationError(f"radius must be positive, got {self.R!r}")

    def distance(self, x):
        return boundary_distance(self, x)


def boundary_distance(domain: BallDomain, x):
    """Distance ``max(R - |x|, 0)`` to the complement of the ball."""
    x = np.asarray(x, dtype=float)
    r = np.abs(x) if domain.n == 1 else np.linalg.norm(x, axis=-1)
    out = np.maximum(domain.R - r, 0.0)
    return out if out.ndim else float(out)


def pair_distance(xa, ga, xb, gb):
    """``|xa - xb|`` for points given with their gaps ``g = L - |x|``.

    Points on the same side of the origin are compared through their gaps,
    which keeps full relative accuracy next to the interval ends.
    """
    xa, ga, xb, gb = (np.asarray(v, dtype=float) for v in (xa, ga, xb, gb))
    same = xa * xb > 0
    return np.where(same, np.abs(ga - gb), np.abs(xa) + np.abs(xb))


class Mesh1D:
    """Sorted nodes in ``(-L, L)`` with exact gaps to the nearest end.

    Parameters
    ----------
    nodes : ndarray
        Strictly increasing interior nodes.
    gaps : ndarray
        ``L - |nodes|`` computed without cancellation.
    half_width : float
        ``L``.
    """

    def __init__(self, nodes, gaps, half_width: float):
        nodes = np.asarray(nodes, dtype=float)
        gaps = np.asarray(gaps, dtype=float)
        if nodes.ndim != 1 or nodes.shape != gaps.shape:
            raise ValueError("nodes and gaps must be 1D arrays of equal length")
        if np.any(gaps <= 0) or np.any(gaps > half_width):
            raise ValueError("nodes must lie in the open interval")
        # ordering is checked on the exact gaps: coordinates of strongly
        # graded nodes may coincide in floating point
        signed = np.where(nodes < 0, gaps - half_width, half_width - gaps)
        steps = pair_distance(nodes[:-1], gaps[:-1], nodes[1:], gaps[1:])
        if np.any(np.diff(nodes) < 0) or np.any(steps <= 0) or np.any(np.diff(signed) < 0):
            raise ValueError("nodes must be strictly increasing")
        self.half_width = float(half_width)
        self.nodes = nodes
        self.gaps = gaps
        self.nodes.flags.writeable = False
        self.gaps.flags.writeable = False
        L = self.half_width
        # cell bounds: midpoints, outermost cells abut the ends
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        same = nodes[:-1] * nodes[1:] > 0
        mid_gap = np.where(same, 0.5 * (gaps[:-1] + gaps[1:]), L - np.abs(mid))
        self.cell_bounds = np.concatenate([[-L], mid, [L]])
        self.bound_gaps = np.concatenate([[0.0], mid_gap, [0.0]])
        self.cell_widths = pair_distance(
            self.cell_bounds[:-1], self.bound_gaps[:-1], self.cell_bounds[1:], self.bound_gaps[1:]
        )
        # elements of the P1 space, including the two boundary elements
        X = np.concatenate([[-L], nodes, [L]])
        G = np.concatenate([[0.0], gaps, [0.0]])
        self.element_lengths = pair_distance(X[:-1], G[:-1], X[1:], G[1:])

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def mass(self) -> np.ndarray:
        """Lumped mass: the cell measures."""
        return self.cell_widths

    def extended_nodes(self):
        """Nodes with the two interval ends attached, with their gaps."""
        L = self.half_width
        return (
            np.concatenate([[-L], self.nodes, [L]]),
            np.concatenate([[0.0], self.gaps, [0.0]]),
        )

    def distances(self, i=None, j=None):
        """Matrix of node distances (rows ``i``, columns ``j``)."""
        x, g = self.nodes, self.gaps
        xi = x if i is None else x[i]
        gi = g if i is None else g[i]
        xj = x if j is None else x[j]
        gj = g if j is None else g[j]
        return pair_distance(xi[:, None], gi[:, None], xj[None, :], gj[None, :])


def default_grading(s: float) -> float:
    """Grading exponent ``min(2/s, 6)``."""
    return min(2.0 / float(s), 6.0)


class GradedGrid(Mesh1D):
    """Boundary-graded grid on ``(-R, R)``.

    Nodes are ``x_i = R sign(t_i) (1 - (1 - |t_i|)^q)`` for uniform
    ``t_i = -1 + 2(i+1)/(N+1)``; the boundary distances
    ``delta_i = R (1 - |t_i|)^q`` are kept exactly.
    """

    def __init__(self, domain: BallDomain, N: int, q: float):
        if domain.n != 1:
            raise ConfigurationError("graded grids live on intervals (n = 1)")
        N = int(N)
        q = float(q)
        if N < 8:
            raise ConfigurationError(f"grid needs N >= 8 nodes, got {N}")
        if not (q >= 1.0 and math.isfinite(q)):
            raise ConfigurationError(f"grading exponent must be >= 1, got {q!r}")
        R = domain.R
        t = -1.0 + 2.0 * np.arange(1, N + 1) / (N + 1)
        delta = R * (1.0 - np.abs(t)) ** q
        x = np.sign(t) * (R - delta)
        super().__init__(x, delta, R)
        self.domain = domain
        self.N = N
        self.q = q

    @property
    def R(self) -> float:
        return self.domain.R

    @property
    def delta(self) -> np.ndarray:
        """Exact boundary distances of the nodes."""
        return self.gaps

    def __repr__(self):
        return f"GradedGrid(N={self.N}, q={self.q:g}, R={self.R:g})"


def build_graded_grid(R: float = 1.0, N: int = 256, q: float = 2.0) -> GradedGrid:
    """Build a :class:`GradedGrid` on ``(-R, R)``."""
    return GradedGrid(BallDomain(1, float(R)), N, q)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values on a grid, zero outside the domain."""

    grid: Mesh1D
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Mesh1D, func, **meta) -> "GridFunction":
        """Sample ``func(x, delta)`` or ``func(x)`` at the nodes."""
        try:
            vals = func(grid.nodes, grid.gaps)
        except TypeError:
            vals = func(grid.nodes)
        return cls(grid, np.broadcast_to(np.asarray(vals, dtype=float), grid.nodes.shape), dict(meta))

    def __len__(self):
        return self.values.size

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values, dict(self.meta))

    def to_csv(self, path=None, s: float | None = None) -> str:
        """Write ``node,value`` rows under a header carrying N, q, R, s."""
        g = self.grid
        s = self.meta.get("s", s)
        head = "# N={} q={} R={} s={}".format(
            g.size,
            repr(float(getattr(g, "q", 1.0))),
            repr(float(g.half_width)),
            "nan" if s is None else repr(float(s)),
        )
        buf = io.StringIO()
        buf.write(head + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "value"])
        for xv, uv in zip(g.nodes, self.values):
            w.writerow([repr(float(xv)), repr(float(uv))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "GridFunction":
        """Read a CSV written by :meth:`to_csv` and rebuild its graded grid."""
        text = Path(source).read_text() if not str(source).lstrip().startswith("#") else str(source)
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing grid header line")
        fields = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        try:
            N, q, R = int(fields["N"]), float(fields["q"]), float(fields["R"])
            s = float(fields["s"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed grid header: {lines[0]!r}") from exc
        rows = list(csv.reader(lines[1:]))
        if not rows or rows[0] != ["node", "value"]:
            raise ValueError("missing column header 'node,value'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        grid = build_graded_grid(R, N, q)
        if data.shape != (N, 2) or not np.allclose(data[:, 0], grid.nodes, rtol=0, atol=1e-14 * R):
            raise ValueError("nodes in file do not match the header grid")
        meta = {} if math.isnan(s) else {"s": s}
        return cls(grid, data[:, 1], meta)


_WEIGHT_KINDS = ("one", "delta_s", "delta_s_log", "phi_delta", "phi_1", "custom")


@dataclass(frozen=True, eq=False)
class Weight:
    """Weight of a Lebesgue norm.

    ``one`` is Lebesgue measure, ``delta_s`` is ``delta^power`` and
    ``delta_s_log`` is ``delta^power (1 + |log delta|)``; both are integrated
    exactly over cells, so negative powers above -1 are fine. The remaining
    kinds carry nodal ``values`` (for instance a computed phi_delta).
    """

    kind: str = "one"
    power: float = 0.0
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {_WEIGHT_KINDS}")
        if self.kind in ("delta_s", "delta_s_log") and not self.power > -1.0:
            raise ValueError("delta weights need power > -1")
        if self.kind in ("phi_delta", "phi_1", "custom"):
            if self.values is None:
                raise ValueError(f"weight {self.kind!r} needs nodal values")
            v = np.asarray(getattr(self.values, "values", self.values), dtype=float)
            if np.any(v < 0) or not np.all(np.isfinite(v)):
                raise ValueError("weight values must be finite and nonnegative")
            object.__setattr__(self, "values", v)

    @classmethod
    def delta_s(cls, s: float) -> "Weight":
        return cls("delta_s", power=float(s))

    @classmethod
    def delta_s_log(cls, s: float) -> "Weight":
        return cls("delta_s_log", power=float(s))


def _pow_antider(g, a):
    return g ** (a + 1.0) / (a + 1.0)


def _powlog_antider(g, a):
    # antiderivative of g^a log g, vanishing at 0 for a > -1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = g ** (a + 1.0) * (np.log(g) / (a + 1.0) - 1.0 / (a + 1.0) ** 2)
    return np.where(g > 0, out, 0.0)


def _gap_interval_integral(g1, g2, a, with_log):
    """``int_{g1}^{g2} g^a (1 + |log g|) dg`` (or without the log term)."""
    val = _pow_antider(g2, a) - _pow_antider(g1, a)
    if with_log:
        lo1, lo2 = np.minimum(g1, 1.0), np.minimum(g2, 1.0)
        hi1, hi2 = np.maximum(g1, 1.0), np.maximum(g2, 1.0)
        val = val - (_powlog_antider(lo2, a) - _powlog_antider(lo1, a))
        val = val + (_powlog_antider(hi2, a) - _powlog_antider(hi1, a))
    return val


def cell_integrals(grid: Mesh1D, power: float = 0.0, with_log: bool = False) -> np.ndarray:
    """Exact cell integrals of ``gap^power`` (times ``1 + |log gap|`` if asked).

    The gap is the distance to the nearest end of the mesh interval, which is
    the boundary distance for a :class:`GradedGrid`.
    """
    L = grid.half_width
    xb, gb = grid.cell_bounds, grid.bound_gaps
    a = float(power)
    left, right = xb[:-1], xb[1:]
    gl, gr = gb[:-1], gb[1:]
    out = np.empty(grid.size)
    # cells inside one half: gap runs between the two bound gaps
    one_side = (left >= 0) | (right <= 0)
    lo = np.minimum(gl, gr)[one_side]
    hi = np.maximum(gl, gr)[one_side]
    out[one_side] = _gap_interval_integral(lo, hi, a, with_log)
    # the cell containing the origin is split there
    mid = ~one_side
    if np.any(mid):
        full = np.full(np.count_nonzero(mid), L)
        out[mid] = _gap_interval_integral(gl[mid], full, a, with_log) + _gap_interval_integral(
            gr[mid], full, a, with_log
        )
    return out


def _cell_weights(grid: Mesh1D, w: Weight) -> np.ndarray:
    if w.kind == "one":
        return grid.cell_widths
    if w.kind == "delta_s":
        return cell_integrals(grid, w.power, with_log=False)
    if w.kind == "delta_s_log":
        return cell_integrals(grid, w.power, with_log=True)
    if w.values.shape != (grid.size,):
        raise ValueError("weight values do not match the grid")
    return w.values * grid.cell_widths


def weighted_norm(u, w: Weight | None = None, p: float = 1.0, grid: Mesh1D | None = None) -> float:
    """Weighted Lebesgue norm ``(int |u|^p w)^(1/p)`` with ``u`` piecewise constant on cells.

    Parameters
    ----------
    u : GridFunction or ndarray
        Nodal values; arrays need ``grid``.
    w : Weight, optional
        Defaults to Lebesgue measure.
    p : float
        Exponent, at least 1.
    """
    if p < 1:
        raise ValueError("exponent p must be >= 1")
    if isinstance(u, GridFunction):
        grid, vals = u.grid, u.values
    else:
        if grid is None:
            raise ValueError("a grid is required for raw arrays")
        vals = np.asarray(u, dtype=float)
    w = w or Weight()
    # scaling by the largest entry avoids under- and overflow of |u|^p
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        return scale if vals.size else 0.0
    total = float(np.sum((np.abs(vals) / scale) ** p * _cell_weights(grid, w)))
    return scale * total ** (1.0 / p)


# ---------------------------------------------------------------------------
# consistent loads for data given as a function of the boundary distance


def _element_pieces(grid: Mesh1D):
    """Elements split at the origin: end gaps ``(g0, g1)``, side sign and element index."""
    X, G = grid.extended_nodes()
    L = grid.half_width
    rows = []
    for e in range(X.size - 1):
        xa, xb, ga, gb = X[e], X[e + 1], G[e], G[e + 1]
        if xa < 0 < xb:
            rows.append((ga, L, -1.0, e))
            rows.append((gb, L, 1.0, e))
        else:
            side = 1.0 if xa + xb > 0 else -1.0
            rows.append((min(ga, gb), max(ga, gb), side, e))
    return np.array(rows)


def _gap_rule(g0, g1, m):
    """Points and weights in the gap variable on ``[g0, g1]``.

    Boundary pieces (``g0 = 0``) use ``delta = g1 t^8``, which removes
    power singularities down to ``delta^{-0.85}``; the rest is integrated in
    ``log delta``.
    """
    t, w = np.polynomial.legendre.leggauss(m)
    t, w = 0.5 * (t + 1.0), 0.5 * w
    pts = np.empty((g0.size, m))
    wts = np.empty((g0.size, m))
    edge = g0 == 0
    if np.any(edge):
        pts[edge] = g1[edge, None] * t**8
        wts[edge] = g1[edge, None] * 8.0 * t**7 * w
    inner = ~edge
    if np.any(inner):
        a, b = np.log(g0[inner]), np.log(g1[inner])
        y = a[:, None] + (b - a)[:, None] * t
        pts[inner] = np.exp(y)
        wts[inner] = (b - a)[:, None] * w * pts[inner]
    return pts, wts


@dataclass(frozen=True, eq=False)
class GapData:
    """Data given as a function of the boundary distance, ``f(delta)``.

    Loads are exact hat integrals ``int f phi_i`` up to quadrature, so
    data that is singular at the boundary (but with ``f delta`` integrable)
    is seen with its true mass instead of a nodal sample.
    """

    func: object
    name: str = "gap-data"

    def values(self, grid: Mesh1D) -> np.ndarray:
        return np.asarray(self.func(grid.gaps), dtype=float)

    def hat_load(self, grid: Mesh1D, m: float | None = None, points: int = 24) -> np.ndarray:
        """``int min(f+, m) - min(f-, m)`` against each hat function."""
        pieces = _element_pieces(grid)
        g0, g1, side, e = pieces[:, 0], pieces[:, 1], pieces[:, 2], pieces[:, 3].astype(int)
        pts, wts = _gap_rule(g0, g1, points)
        fv = np.asarray(self.func(pts), dtype=float)
        if m is not None:
            fv = np.minimum(np.maximum(fv, 0.0), m) - np.minimum(np.maximum(-fv, 0.0), m)
        X, G = grid.extended_nodes()
        L = grid.half_width
        xq = side[:, None] * (L - pts)
        h = grid.element_lengths[e][:, None]
        # distances from quadrature points to the element ends
        dl = pair_distance(xq, pts, X[e][:, None], G[e][:, None])
        dr = pair_distance(xq, pts, X[e + 1][:, None], G[e + 1][:, None])
        load = np.zeros(grid.size + 2)
        np.add.at(load, e, np.sum(wts * fv * dr / h, axis=1))
        np.add.at(load, e + 1, np.sum(wts * fv * dl / h, axis=1))
        return load[1:-1]

    def weighted_integral(self, grid: Mesh1D, power: float) -> float:
        """``int |f| delta^power`` over the interval (cut at ``delta = 1e-150``)."""
        pieces = _element_pieces(grid)
        inner = pieces[:, 0] > 0
        pts, wts = _gap_rule(pieces[inner, 0], pieces[inner, 1], 24)
        total = float(np.sum(wts * np.abs(self.func(pts)) * pts**power))
        # boundary pieces in log delta, out to -infinity
        def integrand(y):
            return abs(float(self.func(np.float64(math.exp(y))))) * math.exp((power + 1.0) * y)

        # the innermost part is cut at delta = 1e-150, where powers up to
        # delta^-2 still evaluate in double precision
        for g1 in pieces[~inner, 1]:
            total += integrate.quad(integrand, -150.0 * math.log(10.0), math.log(g1), limit=400)[0]
        return total
