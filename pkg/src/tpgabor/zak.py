"""Zak transform of TPFFT windows.

    Z_alpha g(x, xi) = sum_k g(x - alpha*k) exp(2*pi*j*alpha*k*xi)

Three evaluation routes are provided: the closed partial-fraction form
(distinct poles), a confluent divided difference (repeated poles), and a
truncated series that serves as an independent check of both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DivisibilityError, MultiplicityTooHigh, PoleOnTorus, ZeroNotResolved
from .window import DISTINCT_RTOL, TpfftWindow, eval_g

DENOM_FLOOR = 1e-14
MAX_MULTIPLICITY = 4
SCAN_NODES = 256
GRID_1D = 4096
FRAME_TOL = 1e-10


def reduce_point(alpha, x, xi):
    """Map (x, xi) into [0, alpha) x [0, 1/alpha).

    Returns the reduced point and the quasiperiodic phase factor p with
    Z(x, xi) = p * Z(x_red, xi_red).
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    shift = np.floor(x / alpha)
    x_red = x - alpha * shift
    # guard against x_red == alpha from rounding
    wrap = x_red >= alpha
    x_red = np.where(wrap, x_red - alpha, x_red)
    shift = np.where(wrap, shift + 1, shift)
    xi_red = xi - np.floor(xi * alpha) / alpha
    phase = np.exp(2j * np.pi * alpha * shift * xi_red)
    return x_red, xi_red, phase


def _branch_terms(delta, alpha, x, xi):
    """exp(-x/delta) / (1 - exp(-alpha(1/delta + 2 pi j xi))) on the fundamental domain."""
    rot = np.exp(-2j * np.pi * alpha * xi)
    if delta > 0:
        num = np.exp(-x / delta)
        den = 1.0 - np.exp(-alpha / delta) * rot
    else:
        # multiply through by exp(alpha/delta) < 1 so nothing overflows
        num = np.exp((alpha - x) / delta)
        den = np.exp(alpha / delta) - rot
    if np.any(np.abs(den) < DENOM_FLOOR):
        raise PoleOnTorus(f"denominator vanishes for delta={delta}, alpha={alpha}")
    return num / den


def zak_closed(w: TpfftWindow, alpha: float, x, xi):
    """Closed-form Zak transform for pairwise distinct poles."""
    w._require_distinct()
    x_red, xi_red, phase = reduce_point(alpha, x, xi)
    total = np.zeros(np.broadcast(x_red, xi_red).shape, dtype=complex)
    for d, c in zip(w.deltas, w.coefficients):
        total = total + (c / d) * _branch_terms(d, alpha, x_red, xi_red)
    out = w.scale * phase * total
    return out if out.ndim else complex(out)


# -- divided differences ------------------------------------------------------

def _derivative_polys(order: int, sign: float, alpha: float) -> list[np.ndarray]:
    """Polynomials P_p with d^p/dy^p u = P_p(u), given u' = sign*alpha*(u - u^2)."""
    gen = sign * alpha * np.array([0.0, 1.0, -1.0])
    polys = [np.array([0.0, 1.0])]
    for _ in range(order):
        polys.append(P.polymul(P.polyder(polys[-1]), gen))
    return polys


def _r_derivatives(y: float, order: int, alpha: float, x: float, xi: float, const: float):
    """Values r^(p)(y), p = 0..order, of r(y) = const * exp(-x y) / (1 - exp(-alpha(y + 2 pi j xi))).

    For y > 0 the factor is u = 1/(1-q), q = exp(-alpha(y+2 pi j xi)).  For y < 0
    it is rewritten as -exp(2 pi j alpha xi) * exp(alpha y) * v with v = 1/(1-1/q),
    the branch whose geometric series converges.
    """
    rot = np.exp(2j * np.pi * alpha * xi)
    if y > 0:
        q = np.exp(-alpha * y) / rot
        s, pre, sign = -x, const, 1.0
    else:
        q = np.exp(alpha * y) * rot
        s, pre, sign = alpha - x, -const * rot, -1.0
    if abs(1.0 - q) < DENOM_FLOOR:
        raise PoleOnTorus(f"denominator vanishes at knot {y}")
    u = 1.0 / (1.0 - q)
    e = np.exp(s * y)
    upolys = _derivative_polys(order, sign, alpha)
    uders = [P.polyval(u, p) for p in upolys]
    out = []
    for p in range(order + 1):
        acc = sum(comb(p, t) * s ** (p - t) * uders[t] for t in range(p + 1))
        out.append(pre * e * acc)
    return out


def _group_knots(knots: list[float]) -> list[list[float]]:
    groups: list[list[float]] = []
    for a in sorted(knots):
        if groups and abs(a - groups[-1][0]) < DISTINCT_RTOL * max(abs(a), abs(groups[-1][0])):
            groups[-1].append(a)
        else:
            groups.append([a])
    return groups


def divided_difference(knots: list[float], derivs: Callable[[float, int], list]) -> complex:
    """Divided difference over knots with multiplicities.

    ``derivs(y, p)`` must return the values f(y), f'(y), ..., f^(p)(y).
    Coincident knots consume derivatives: [y,...,y (p+1 times)] f = f^(p)(y)/p!.
    """
    groups = _group_knots(knots)
    z: list[float] = []
    vals: dict[int, list] = {}
    for g in groups:
        y = g[0]
        d = derivs(y, len(g) - 1)
        for _ in g:
            vals[len(z)] = d
            z.append(y)
    n = len(z)
    table = [vals[i][0] for i in range(n)]
    for j in range(1, n):
        new = []
        for i in range(n - j):
            if z[i + j] == z[i]:
                new.append(vals[i][j] / factorial(j))
            else:
                new.append((table[i + 1] - table[i]) / (z[i + j] - z[i]))
        table = new
    return table[0]


def zak_divdiff(w: TpfftWindow, alpha: float, x, xi):
    """Zak transform as the divided difference [a_1..a_m | r_{x,xi}], a_i = 1/delta_i.

    Works for repeated poles (multiplicity up to 4).
    """
    knots = [1.0 / d for d in w.deltas]
    for g in _group_knots(knots):
        if len(g) > MAX_MULTIPLICITY:
            raise MultiplicityTooHigh(f"knot {g[0]} repeats {len(g)} times (max {MAX_MULTIPLICITY})")
    m = len(knots)
    const = (-1) ** (m - 1) * math.prod(knots) * w.scale
    x_red, xi_red, phase = reduce_point(alpha, x, xi)
    x_red, xi_red = np.broadcast_arrays(x_red, xi_red)
    out = np.empty(x_red.shape, dtype=complex)
    for idx in np.ndindex(x_red.shape):
        xv, fv = float(x_red[idx]), float(xi_red[idx])
        out[idx] = divided_difference(
            knots, lambda y, p: _r_derivatives(y, p, alpha, xv, fv, const)
        )
    out = out * phase
    return out if out.ndim else complex(out)


def zak(w: TpfftWindow, alpha: float, x, xi):
    """Closed form when the poles are distinct, divided difference otherwise."""
    if w.distinct:
        return zak_closed(w, alpha, x, xi)
    return zak_divdiff(w, alpha, x, xi)


def series_terms(w: TpfftWindow, alpha: float, x_abs: float, tol: float) -> int:
    """Smallest K with the tail of the Zak series below tol/10 for |x| <= x_abs."""
    cb, rate = w.decay_constant(), w.decay_rate()
    ratio = math.exp(-alpha * rate)
    # sum_{k > K} cb * exp(-rate (alpha k - x_abs)), counted on both sides
    target = tol / 10.0 * (1.0 - ratio) / (2.0 * cb)
    k = (x_abs * rate - math.log(target)) / (alpha * rate) - 1.0
    return max(int(math.ceil(k)), 1)


def zak_series(w: TpfftWindow, alpha: float, x, xi, tol: float = 1e-15,
               func: Optional[Callable] = None):
    """Truncated Zak sum centered at x, evaluated literally (no reduction).

    ``func`` replaces the pointwise window evaluation, e.g. for repeated poles
    where :func:`eval_g` does not apply; the truncation still uses the decay
    bound of ``w``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = func if func is not None else (lambda t: eval_g(w, t))
    x, xi = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xi, dtype=float))
    kstar = series_terms(w, alpha, alpha, tol)
    offsets = np.arange(-kstar, kstar + 1)
    out = np.empty(x.shape, dtype=complex)
    flat_x, flat_xi = x.ravel(), xi.ravel()
    res = out.reshape(-1)
    center = np.round(flat_x / alpha)
    for idx in range(flat_x.size):
        k = center[idx] + offsets
        terms = g(flat_x[idx] - alpha * k) * np.exp(2j * np.pi * alpha * k * flat_xi[idx])
        res[idx] = np.sum(terms)
    return out if out.ndim else complex(out)


# -- grids, zeros, critical density --------------------------------------------

@dataclass(frozen=True)
class ZakGrid:
    alpha: float
    nx: int
    nxi: int
    values: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.alpha / self.nx

    @property
    def xi(self) -> np.ndarray:
        return np.arange(self.nxi) / (self.alpha * self.nxi)

    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def zak_grid(w: TpfftWindow, alpha: float, nx: int, nxi: int) -> ZakGrid:
    """Sample Z_alpha g on the uniform grid x_p = p alpha/nx, xi_q = q/(alpha nxi)."""
    xs = np.arange(nx) * alpha / nx
    xis = np.arange(nxi) / (alpha * nxi)
    vals = zak(w, alpha, xs[:, None], xis[None, :])
    return ZakGrid(alpha, nx, nxi, np.asarray(vals))


@dataclass(frozen=True)
class ZakZero:
    x0: float
    xi0: float
    residual: float


def golden_section(f: Callable[[float], float], a: float, b: float,
                   xtol: float = 1e-15, maxiter: int = 200) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) <= xtol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return c if fc <= fd else d


def find_zak_zero(w: TpfftWindow, alpha: float, tol: float = 1e-8,
                  nodes: int = SCAN_NODES) -> ZakZero:
    """Locate the zero of Z_alpha g on the line xi = 1/(2 alpha).

    A coarse scan of |Z| brackets the minimum, golden-section search refines
    it.  |Z| (same minimizer as |Z|^2) is used so the objective has a kink
    rather than a flat bottom, which lets the search reach full precision.
    """
    xi0 = 1.0 / (2.0 * alpha)
    xs = np.arange(nodes) * alpha / nodes
    mod = np.abs(zak(w, alpha, xs, xi0))
    p = int(np.argmin(mod))
    h = alpha / nodes

    def objective(t):
        return float(abs(zak(w, alpha, t, xi0)))

    x0 = golden_section(objective, xs[p] - h, xs[p] + h)
    residual = objective(x0)
    x0 = float(x0 - alpha * math.floor(x0 / alpha))
    if not residual < tol:
        raise ZeroNotResolved(f"|Z| = {residual:.3e} at x = {x0} is not below {tol:.1e}")
    return ZakZero(x0, xi0, residual)


class CriticalBounds(NamedTuple):
    A: float
    B: float
    is_frame: bool
    argmin: tuple


def _refine_min(f, center, h):
    t = golden_section(f, center - h, center + h)
    return t, f(t)


def critical_bounds(w: TpfftWindow, M: int, K: Optional[int] = None, setting: str = "sequence",
                    nodes: int = GRID_1D, frame_tol: float = FRAME_TOL) -> CriticalBounds:
    """Frame bounds at critical density alpha = M, beta = 1/M from |Z_M g|^2.

    ``setting`` picks the evaluation set:
      sequence  k in {0..M-1} x uniform xi-grid of [0, 1/M)
      periodic  uniform x-grid of [0, M) x {l/K : l < K/M}
      finite    {0..M-1} x {l/K : l < K/M}
    On the dense settings the grid minimizer is refined by golden-section
    search so narrow dips between nodes are not missed.
    """
    M = int(M)
    if setting in ("periodic", "finite"):
        if K is None:
            raise DivisibilityError(f"setting {setting!r} needs a period K")
        if K % M:
            raise DivisibilityError(f"K/M = {K}/{M} is not an integer")
        ls = np.arange(K // M) / K
    if setting == "sequence":
        xs = np.arange(M, dtype=float)
        xis = np.arange(nodes) / (M * nodes)
    elif setting == "periodic":
        xs = np.arange(nodes) * M / nodes
        xis = ls
    elif setting == "finite":
        xs = np.arange(M, dtype=float)
        xis = ls
    else:
        raise ValueError(f"unknown setting {setting!r}")

    vals = np.abs(np.asarray(zak(w, M, xs[:, None], xis[None, :]))) ** 2
    p, q = np.unravel_index(int(np.argmin(vals)), vals.shape)
    A, B = float(vals[p, q]), float(vals.max())
    argmin = (float(xs[p]), float(xis[q]))
    if setting == "sequence":
        t, v = _refine_min(lambda s: float(abs(zak(w, M, xs[p], s)) ** 2), xis[q], 1.0 / (M * nodes))
        if v < A:
            A, argmin = v, (float(xs[p]), float(t))
    elif setting == "periodic":
        t, v = _refine_min(lambda s: float(abs(zak(w, M, s, xis[q])) ** 2), xs[p], M / nodes)
        if v < A:
            A, argmin = v, (float(t), float(xis[q]))
    return CriticalBounds(A, B, A > frame_tol, argmin)
