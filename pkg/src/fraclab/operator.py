"""Discrete restricted fractional Laplacian in one dimension.

Two realizations live here. :func:`apply_pointwise` evaluates the singular
integral at a point for functions known in closed form. :func:`assemble_galerkin`
builds the symmetric P1 stiffness matrix used by every solver in the package.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .errors import ConfigurationError, IterationError, MatrixInvariantError
from .grid import GridFunction, Mesh1D, pair_distance
from .special import check_order, normalization_constant

__all__ = [
    "OperatorMatrix",
    "Eigenpair",
    "PointwiseResult",
    "assemble_galerkin",
    "solve_dirichlet",
    "eigenpair",
    "apply_pointwise",
    "pointwise_laplacian",
    "eilertsen_residual",
    "eilertsen_terms",
    "write_matrix",
    "read_matrix",
    "DENSE_CAP",
]

DENSE_CAP = 8192
_MID_RATIO = 16.0
_MATRIX_MAGIC = b"FRACMAT1"


# ---------------------------------------------------------------------------
# Galerkin matrix


@dataclass(eq=False)
class OperatorMatrix:
    """Assembled stiffness matrix with its lumped mass.

    Attributes
    ----------
    grid : Mesh1D
    s : float
    entries : ndarray, shape (N, N)
    mass : ndarray, shape (N,)
        Cell measures.
    sign_correction : float
        Largest positive off-diagonal entry moved to the diagonal, relative to
        the largest diagonal entry (0 when the raw matrix already had the sign
        pattern).
    """

    grid: Mesh1D
    s: float
    entries: np.ndarray
    mass: np.ndarray
    sign_correction: float = 0.0
    _factor: tuple | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.mass.size

    def factor(self):
        if self._factor is None:
            try:
                self._factor = cho_factor(self.entries, lower=False, check_finite=True)
            except LinAlgError as exc:
                raise MatrixInvariantError(f"Cholesky factorization failed: {exc}") from exc
        return self._factor

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``A x = rhs`` (no mass applied)."""
        return cho_solve(self.factor(), np.asarray(rhs, dtype=float))

    def apply(self, v) -> np.ndarray:
        return self.entries @ np.asarray(getattr(v, "values", v), dtype=float)

    def energy(self, v) -> float:
        """Quadratic form ``v^T A v``."""
        v = np.asarray(getattr(v, "values", v), dtype=float)
        return float(v @ (self.entries @ v))

    def shifted(self, potential_values) -> "OperatorMatrix":
        """``A + M diag(V)`` for nodal potential values (Schrodinger matrix)."""
        V = np.asarray(potential_values, dtype=float)
        if V.shape != self.mass.shape or np.any(V < 0) or not np.all(np.isfinite(V)):
            raise ValueError("potential values must be finite, nonnegative and nodal")
        ent = self.entries.copy()
        ent[np.diag_indices_from(ent)] += self.mass * V
        return OperatorMatrix(self.grid, self.s, ent, self.mass, self.sign_correction)

    def sign_defects(self) -> tuple[float, float]:
        """Largest positive off-diagonal entry and most negative row sum."""
        off = self.entries - np.diag(np.diag(self.entries))
        return float(max(off.max(), 0.0)), float(min(self.entries.sum(axis=1).min(), 0.0))


def _phi(z, s):
    """Second antiderivative of the kernel ``-(|z|^{1-2s} - 1)/(s(1-2s))``.

    The constant shift in the kernel is invisible to the bilinear form and makes
    the expression continuous through ``s = 1/2`` (where it equals the
    logarithmic kernel).
    """
    z = np.abs(np.asarray(z, dtype=float))
    eps = 1.0 - 2.0 * s
    out = np.zeros_like(z)
    pos = z > 0
    logz = np.log(z[pos])
    e = np.expm1(eps * logz) / eps if eps != 0.0 else logz
    out[pos] = -z[pos] ** 2 * (2.0 * e - 3.0 - eps) / (2.0 * s * (1.0 + eps) * (2.0 + eps))
    return out


def _hat_points(mesh: Mesh1D, m: int):
    """Gauss points of every hat function: coordinates, gaps, weights (N, 2m)."""
    X, G = mesh.extended_nodes()
    L = mesh.half_width
    h = mesh.element_lengths
    tau, w = np.polynomial.legendre.leggauss(m)
    tau = 0.5 * (tau + 1.0)
    w = 0.5 * w
    N = mesh.size
    px = np.empty((N, 2 * m))
    pg = np.empty((N, 2 * m))
    pw = np.empty((N, 2 * m))
    for side in (0, 1):
        e = np.arange(N) + side
        xa, xb, ga, gb = X[e], X[e + 1], G[e], G[e + 1]
        x = xa[:, None] + tau[None, :] * h[e][:, None]
        one_side = ((xa >= 0) | (xb <= 0))[:, None]
        g = np.where(one_side, ga[:, None] + tau[None, :] * (gb - ga)[:, None], L - np.abs(x))
        hat = tau if side == 0 else 1.0 - tau
        sl = slice(side * m, (side + 1) * m)
        px[:, sl], pg[:, sl] = x, g
        pw[:, sl] = (w * hat)[None, :] * h[e][:, None]
    return px, pg, pw


def _power_antiderivatives(t, s):
    """Antiderivatives of ``t^{-2s}`` and ``t^{-1-2s}`` (the first shifted by a constant)."""
    eps = 1.0 - 2.0 * s
    logt = np.log(t)
    p1 = np.expm1(eps * logt) / eps if eps != 0.0 else logt
    p0 = -np.exp(-2.0 * s * logt) / (2.0 * s)
    return p1, p0


def _hat_potential(s, tn, tm, tf, hn, hf):
    """``int phi(y) |x-y|^{-1-2s} dy`` for a hat seen from an exterior point.

    ``tn < tm < tf`` are the distances from the point to the near end, the
    apex and the far end of the hat; ``hn, hf`` are the element lengths.
    """
    p1n, p0n = _power_antiderivatives(tn, s)
    p1m, p0m = _power_antiderivatives(tm, s)
    p1f, p0f = _power_antiderivatives(tf, s)
    rising = (p1m - p1n - tn * (p0m - p0n)) / hn
    falling = (tf * (p0f - p0m) - (p1f - p1m)) / hf
    return rising + falling


def assemble_galerkin(grid: Mesh1D, s: float, dense_cap: int = DENSE_CAP, chunk: int = 128,
                      enforce_sign: bool = True) -> OperatorMatrix:
    """Stiffness matrix of the restricted fractional Laplacian on P1 hats.

    ``A_ij = (c/2) int int (phi_i(x)-phi_i(y)) (phi_j(x)-phi_j(y)) |x-y|^{-1-2s}``
    over the whole line, with ``c = c_{1,s}``.

    Three regimes keep every entry accurate on strongly graded grids:

    * hats at most two indices apart are integrated exactly. The form equals
      ``(c/2) int int phi_i' phi_j' K(x-y)`` with an explicit kernel ``K``
      whose second antiderivative is known, so each element pair needs four
      evaluations of it;
    * separated hats at moderate distance use
      ``-c int phi_i(x) [int phi_j(y) |x-y|^{-1-2s} dy] dx`` with the inner
      integral in closed form over the larger hat and 8-point Gauss-Legendre
      per element of the smaller one;
    * distant hats use 2x2 Gauss-Legendre per element pair.

    Parameters
    ----------
    grid : Mesh1D
    s : float
    dense_cap : int
        Largest admissible node count.
    chunk : int
        Rows processed per vectorized block.
    enforce_sign : bool
        Move positive off-diagonal entries onto the diagonal. For small ``s``
        a few entries next to the boundary of the exact matrix are slightly
        positive; the shift keeps the matrix symmetric positive definite,
        leaves row sums unchanged and restores the M-matrix sign pattern. Its
        relative size is stored in ``sign_correction``.

    Returns
    -------
    OperatorMatrix
    """
    s = check_order(s)
    N = grid.size
    if N > dense_cap:
        raise ConfigurationError(f"N = {N} exceeds the dense matrix cap {dense_cap}")
    c = normalization_constant(1, s)
    X, G = grid.extended_nodes()
    h = grid.element_lengths
    span = h[:-1] + h[1:]
    A = np.empty((N, N))
    px, pg, pw = _hat_points(grid, 2)
    mid_i, mid_j = [], []
    J = np.arange(N)
    for i0 in range(0, N, chunk):
        I = np.arange(i0, min(N, i0 + chunk))
        d = pair_distance(px[I][:, :, None, None], pg[I][:, :, None, None], px[None, None], pg[None, None])
        with np.errstate(divide="ignore"):
            K = d ** (-1.0 - 2.0 * s)
        A[I] = -c * np.einsum("ia,iajb,jb->ij", pw[I], K, pw, optimize=True)
        lo = np.minimum(I[:, None], J[None, :])
        hi = np.maximum(I[:, None], J[None, :])
        sep = hi - lo >= 3
        gap = np.where(sep, pair_distance(X[lo + 2], G[lo + 2], X[np.minimum(hi, N + 1)], G[np.minimum(hi, N + 1)]), 0.0)
        ratio = gap / np.maximum(span[I][:, None], span[None, :])
        a, b = np.nonzero(sep & (ratio < _MID_RATIO) & (I[:, None] < J[None, :]))
        mid_i.append(I[a])
        mid_j.append(b)

    # moderate separation: outer quadrature over the hat with the smaller support
    ii, jj = np.concatenate(mid_i), np.concatenate(mid_j)
    if ii.size:
        qx, qg, qw = _hat_points(grid, 8)
        small_first = span[ii] <= span[jj]
        o = np.where(small_first, ii, jj)
        t = np.where(small_first, jj, ii)
        for k0 in range(0, o.size, 32768):
            oo, tt = o[k0:k0 + 32768], t[k0:k0 + 32768]
            xo, go = qx[oo], qg[oo]
            left = (oo < tt)[:, None]  # outer hat lies left of the target hat
            near_end = np.where(left[:, 0], tt, tt + 2)
            far_end = np.where(left[:, 0], tt + 2, tt)
            apex = tt + 1
            tn = pair_distance(xo, go, X[near_end][:, None], G[near_end][:, None])
            tm = pair_distance(xo, go, X[apex][:, None], G[apex][:, None])
            tf = pair_distance(xo, go, X[far_end][:, None], G[far_end][:, None])
            hn = np.where(left[:, 0], h[tt], h[tt + 1])[:, None]
            hf = np.where(left[:, 0], h[tt + 1], h[tt])[:, None]
            F = _hat_potential(s, tn, tm, tf, hn, hf)
            A[oo, tt] = A[tt, oo] = -c * np.sum(qw[oo] * F, axis=1)

    # hats overlapping or touching: exact panel formula
    ii = np.concatenate([np.arange(N - k) for k in range(3)])
    jj = np.concatenate([np.arange(k, N) for k in range(3)])

    def phid(p, q):
        return _phi(pair_distance(X[p], G[p], X[q], G[q]), s)

    val = np.zeros(ii.size)
    for de in (0, 1):
        e = ii + de
        di = (1.0 if de == 0 else -1.0) / h[e]
        for df in (0, 1):
            f = jj + df
            dj = (1.0 if df == 0 else -1.0) / h[f]
            val += di * dj * (phid(e + 1, f) - phid(e + 1, f + 1) - phid(e, f) + phid(e, f + 1))
    A[ii, jj] = 0.5 * c * val
    A[jj, ii] = 0.5 * c * val

    A = 0.5 * (A + A.T)
    correction = 0.0
    if enforce_sign:
        off = A.copy()
        np.fill_diagonal(off, 0.0)
        pos = np.maximum(off, 0.0)
        if pos.any():
            correction = float(pos.max() / np.abs(np.diag(A)).max())
            A -= pos
            A[np.diag_indices_from(A)] += pos.sum(axis=1)
    if not np.all(np.isfinite(A)):
        raise MatrixInvariantError("non-finite stiffness entries")
    return OperatorMatrix(grid, s, A, grid.mass.copy(), correction)


def solve_dirichlet(A: OperatorMatrix, f) -> GridFunction:
    """Discrete weak solution of ``(-Delta)^s u = f`` with zero exterior data.

    Solves ``A u = M f`` with the lumped mass ``M`` by Cholesky factorization.
    """
    fv = np.asarray(getattr(f, "values", f), dtype=float)
    if fv.shape != A.mass.shape or not np.all(np.isfinite(fv)):
        raise ValueError("data must be finite nodal values on the matrix grid")
    u = A.solve(A.mass * fv)
    return GridFunction(A.grid, u, {"s": A.s})


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """First Dirichlet eigenpair ``A phi = lambda M phi``."""

    lambda1: float
    phi1: GridFunction
    iterations: int


def eigenpair(A: OperatorMatrix, tol: float = 1e-12, maxiter: int = 1000) -> Eigenpair:
    """Inverse power iteration for the smallest generalized eigenvalue.

    Stops once the Rayleigh quotient changes by less than ``tol`` relative;
    the eigenvector is positive and normalized in the lumped L2 norm.
    """
    M = A.mass
    v = np.ones(A.size)
    v /= math.sqrt(v @ (M * v))
    lam_old = A.energy(v)
    for it in range(1, maxiter + 1):
        w = A.solve(M * v)
        v = w / math.sqrt(w @ (M * w))
        lam = A.energy(v)
        if abs(lam - lam_old) <= tol * abs(lam):
            break
        lam_old = lam
    else:
        res = np.linalg.norm(A.apply(v) - lam * M * v)
        raise IterationError(f"inverse iteration did not converge in {maxiter} steps", res)
    if v.sum() < 0:
        v = -v
    return Eigenpair(float(lam), GridFunction(A.grid, v, {"s": A.s}), it)


# ---------------------------------------------------------------------------
# Binary matrix dump


def write_matrix(A: OperatorMatrix, path) -> None:
    """Dump the stiffness matrix: 32-byte header then row-major float64.

    Header fields, each 8 bytes little-endian: magic, ``N`` (int64), ``s`` and
    ``R`` (float64).
    """
    N = A.size
    head = _MATRIX_MAGIC + struct.pack("<qdd", N, A.s, A.grid.half_width)
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(np.ascontiguousarray(A.entries, dtype="<f8").tobytes())


def read_matrix(path):
    """Read a dump written by :func:`write_matrix`; returns ``(entries, s, R)``."""
    raw = Path(path).read_bytes()
    if len(raw) < 32 or raw[:8] != _MATRIX_MAGIC:
        raise ValueError("not a matrix dump (bad magic)")
    N, s, R = struct.unpack("<qdd", raw[8:32])
    body = np.frombuffer(raw[32:], dtype="<f8")
    if body.size != N * N:
        raise ValueError(f"matrix dump truncated: expected {N * N} entries, found {body.size}")
    return body.reshape(N, N).copy(), s, R


# ---------------------------------------------------------------------------
# Pointwise principal value


@dataclass(frozen=True)
class PointwiseResult:
    """Value of a singular integral with its error estimate.

    ``scale`` is the sum of the magnitudes of the partial integrals; relative
    checks divide by it.
    """

    value: float
    error: float
    scale: float
    warning: str | None = None


class _Pieces:
    def __init__(self):
        self.value = 0.0
        self.error = 0.0
        self.scale = 0.0
        self.warning = None

    def add(self, val, err):
        self.value += val
        self.error += err
        self.scale += abs(val)

    def warn(self, msg):
        self.warning = msg if self.warning is None else f"{self.warning}; {msg}"

    def result(self, factor=1.0) -> PointwiseResult:
        return PointwiseResult(factor * self.value, abs(factor) * self.error, abs(factor) * self.scale, self.warning)


def _quad(fun, a, b, pieces, factor=1.0, **kw):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        val, err = integrate.quad(fun, a, b, limit=400, epsabs=0.0, epsrel=1e-11, **kw)
    # quadpack flags roundoff even when the estimate is tiny; only report real trouble
    if caught and err > 1e-8 * abs(val):
        pieces.warn(str(caught[-1].message).strip().splitlines()[0])
    pieces.add(factor * val, abs(factor) * err)


def _second_difference_integral(D, s, r, hmax, breaks, tail):
    """``int_0^inf D(h) h^{-1-2s} dh`` for a second difference ``D(h) = O(h^2)``.

    ``[0, r]`` uses the algebraic weight ``h^{1-2s}`` on the even function
    ``D(h)/h^2``; the middle range ``[r, hmax]`` is split at ``breaks``. Beyond
    ``T = hmax`` write ``D = D_inf - E``. The tail is ``("const", D_inf)`` when
    ``E`` vanishes there, ``("power", D_inf, E, beta)`` when ``E(h) ~ h^beta``,
    or ``("cutoff", ...)`` which only adds an error bound.
    """
    pieces = _Pieces()
    kern = lambda h: D(h) * h ** (-1.0 - 2.0 * s)  # noqa: E731
    if r > 0:
        h1 = 1e-3 * r

        def g(h):
            if h < h1:
                # even in h: Richardson limit at the origin
                return (4.0 * D(h1) / h1**2 - D(2 * h1) / (2 * h1) ** 2) / 3.0
            return D(h) / (h * h)

        _quad(g, 0.0, r, pieces, weight="alg", wvar=(1.0 - 2.0 * s, 0.0))
    else:
        pieces.warn("no regular neighbourhood around the evaluation point")
    edges = [r] + sorted(b for b in set(breaks) if r < b < hmax) + [hmax]
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            _quad(kern, a, b, pieces)
    T = hmax
    kind = tail[0]
    if kind == "const":
        pieces.add(tail[1] * T ** (-2.0 * s) / (2.0 * s), 0.0)
    elif kind == "power":
        _, d_inf, E, beta = tail
        if not beta < 2.0 * s:
            raise ValueError("tail growth exponent must be below 2s")
        pieces.add(d_inf * T ** (-2.0 * s) / (2.0 * s), 0.0)
        # tau = T/h maps [T, inf) onto (0, 1]; E(T/tau) (tau/T)^beta is smooth at 0
        _quad(lambda t: E(T / max(t, 1e-9)) * (max(t, 1e-9) / T) ** beta, 0.0, 1.0, pieces,
              factor=-(T ** (beta - 2.0 * s)), weight="alg", wvar=(2.0 * s - 1.0 - beta, 0.0))
    else:
        bound = 2.0 * abs(D(T)) * T ** (-2.0 * s) / (2.0 * s)
        pieces.error += bound
        pieces.warn(f"integral truncated at |y - x| = {T:g}, tail bound {bound:.3g}")
    return pieces


def _geometry(x, radius_split, breakpoints, support, tail_power, cutoff):
    """Shared choice of split radius, break distances and tail treatment."""
    bps = np.asarray(breakpoints if breakpoints is not None else (), dtype=float)
    dist = np.abs(bps - x)
    if radius_split is None:
        pos = dist[dist > 0]
        r = 0.5 * pos.min() if pos.size else 0.5
        if np.any(dist == 0):
            r = 0.0
    else:
        r = float(radius_split)
        if r < 0:
            raise ValueError("radius_split must be nonnegative")
    if support is not None:
        a, b = support
        hmax = max(x - a, b - x, r)
        tail = ("const",)
    else:
        far = dist.max() if dist.size else 0.0
        hmax = max(2.0 * far, 4.0 * r, 1.0)
        tail = ("power", float(tail_power)) if tail_power is not None else ("cutoff",)
        if tail_power is None:
            hmax = max(hmax, float(cutoff))
    return r, list(dist), hmax, tail


def pointwise_laplacian(u, s: float, x: float, radius_split: float | None = None, *,
                        breakpoints=(-1.0, 1.0), support=None, tail_power=None,
                        cutoff: float = 1e4) -> PointwiseResult:
    """``(-Delta)^s u(x)`` by adaptive quadrature of the principal value.

    Uses ``c_{1,s} int_0^inf (2u(x) - u(x+h) - u(x-h)) h^{-1-2s} dh``.

    Parameters
    ----------
    u : callable
        Vectorizable or scalar function on the whole line, including its values
        outside the domain (zero for the restricted operator).
    s : float
    x : float
    radius_split : float, optional
        Radius of the neighbourhood where the second difference is divided by
        ``h^2`` and integrated against ``h^{1-2s}``. Defaults to half the distance
        from ``x`` to the nearest breakpoint.
    breakpoints : sequence of float
        Points where ``u`` is not smooth (default: the ends of ``(-1, 1)``).
    support : (a, b), optional
        ``u`` vanishes outside ``[a, b]``; the tail is then exact.
    tail_power : float, optional
        ``u(y) ~ |y|^tail_power`` at infinity; the tail is integrated after the
        substitution ``tau = T/h``.
    cutoff : float
        Truncation radius when neither ``support`` nor ``tail_power`` is given.

    Returns
    -------
    PointwiseResult
    """
    s = check_order(s)
    x = float(x)
    ux = float(u(x))
    r, dist, hmax, tail = _geometry(x, radius_split, breakpoints, support, tail_power, cutoff)
    def E(h):
        return float(u(x + h)) + float(u(x - h))

    def D(h):
        return 2.0 * ux - E(h)

    if tail[0] == "const":
        tail = ("const", 2.0 * ux)
    elif tail[0] == "power":
        tail = ("power", 2.0 * ux, E, tail[1])

    pieces = _second_difference_integral(D, s, r, hmax, dist, tail)
    return pieces.result(normalization_constant(1, s))


def apply_pointwise(u, s: float, x: float, radius_split: float | None = None, **kwargs) -> float:
    """Value of ``(-Delta)^s u`` at ``x``; see :func:`pointwise_laplacian`.

    Accuracy problems (for instance ``u`` not smooth near ``x``) are reported
    as a :class:`RuntimeWarning` rather than an exception.
    """
    res = pointwise_laplacian(u, s, x, radius_split, **kwargs)
    if res.warning:
        warnings.warn(f"apply_pointwise at x={x:g}: {res.warning}", RuntimeWarning, stacklevel=2)
    return res.value


def eilertsen_terms(u, v, s: float, x: float, radius_split: float | None = None, **kwargs) -> dict:
    """The four terms of the product rule for ``(-Delta)^s (u v)`` at ``x``.

    Returns a dict with ``L_uv``, ``u_Lv``, ``v_Lu``, ``cross`` (the
    ``c_{1,s}``-weighted bilinear integral), ``residual`` and ``scale``.
    """
    s = check_order(s)
    x = float(x)
    c = normalization_constant(1, s)
    uv = lambda y: float(u(y)) * float(v(y))  # noqa: E731
    Luv = pointwise_laplacian(uv, s, x, radius_split, **kwargs)
    Lu = pointwise_laplacian(u, s, x, radius_split, **kwargs)
    Lv = pointwise_laplacian(v, s, x, radius_split, **kwargs)
    ux, vx = float(u(x)), float(v(x))
    r, dist, hmax, tail = _geometry(x, radius_split, kwargs.get("breakpoints", (-1.0, 1.0)),
                                    kwargs.get("support"), kwargs.get("tail_power"),
                                    kwargs.get("cutoff", 1e4))
    def D(h):
        up, um = float(u(x + h)), float(u(x - h))
        vp, vm = float(v(x + h)), float(v(x - h))
        return (ux - up) * (vx - vp) + (ux - um) * (vx - vm)

    def E(h):
        return 2.0 * ux * vx - D(h)

    if tail[0] == "const":
        tail = ("const", 2.0 * ux * vx)
    elif tail[0] == "power":
        # products of two factors growing like |y|^beta
        tail = ("power", 2.0 * ux * vx, E, 2.0 * tail[1])

    cross = _second_difference_integral(D, s, r, hmax, dist, tail).result(c)
    terms = {
        "L_uv": Luv.value,
        "u_Lv": ux * Lv.value,
        "v_Lu": vx * Lu.value,
        "cross": cross.value,
    }
    terms["residual"] = terms["L_uv"] - terms["u_Lv"] - terms["v_Lu"] + terms["cross"]
    terms["scale"] = Luv.scale + abs(ux) * Lv.scale + abs(vx) * Lu.scale + cross.scale
    terms["error"] = Luv.error + abs(ux) * Lv.error + abs(vx) * Lu.error + cross.error
    return terms


def eilertsen_residual(u, v, s: float, x: float, radius_split: float | None = None, **kwargs) -> float:
    """Residual of the product rule with constant ``A_s = c_{1,s}``.

    ``(-Delta)^s(uv) - u (-Delta)^s v - v (-Delta)^s u
    + c_{1,s} int (u(x)-u(y)) (v(x)-v(y)) |x-y|^{-1-2s} dy``, which vanishes
    identically.
    """
    return eilertsen_terms(u, v, s, x, radius_split, **kwargs)["residual"]
