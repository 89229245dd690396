"""Compactly supported dual windows for G(g, alpha, beta) with alpha*beta < 1.

For each offset x in [0, alpha) the values gamma(x + alpha*i) come from one
row of the pseudoinverse of the collocation matrix

    P = ( g(x + alpha*i - k/beta) )_{i1 <= i <= i2, k1 <= k <= k2},

namely the row belonging to k = 0, scaled by beta.  The index ranges are
chosen so that P has more rows than columns and full column rank.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import mpmath
import numpy as np
import scipy.linalg

from .discretize import SampledSignal
from .errors import DensityError, LeftInverseResidual, LengthMismatch, OffsetNotTabulated, RankDeficient
from .window import TpfftWindow, eval_g

RANK_RTOL = 1e-10
LEFT_INVERSE_TOL = 1e-8
EXTENDED_DPS = 50


def _exact(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class LatticeParams:
    """Time step alpha and frequency step beta (floats or exact Fractions)."""
    alpha: float | Fraction
    beta: float | Fraction

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"lattice steps must be positive, got alpha={self.alpha}, beta={self.beta}")

    @property
    def product(self) -> Fraction:
        return _exact(self.alpha) * _exact(self.beta)

    @property
    def density(self) -> float:
        return float(1 / self.product)

    @property
    def a(self) -> float:
        return float(self.alpha)

    @property
    def b(self) -> float:
        return float(self.beta)


class SupportPlan(NamedTuple):
    r: int
    k1: int
    k2: int
    i1: int
    i2: int
    L: int
    x: float

    @property
    def rows(self) -> int:
        return self.i2 - self.i1 + 1

    @property
    def cols(self) -> int:
        return self.k2 - self.k1 + 1

    @property
    def k0(self) -> int:
        """0-based column position of k = 0."""
        return -self.k1


def support_bound(lattice: LatticeParams, m: int, n: int, L: int) -> tuple[float, float]:
    """Interval [(-r m - L - 1)/beta, (r n + L + 1)/beta] containing supp gamma."""
    r = math.floor(1 / (1 - lattice.product))
    b = _exact(lattice.beta)
    return float((-r * m - L - 1) / b), float((r * n + L + 1) / b)


def plan_support(lattice: LatticeParams, m: int, n: int, L: int, x=0, side: str = "algorithm") -> SupportPlan:
    """Integer bookkeeping of steps 1-3, done in exact rational arithmetic.

    ``side="left"`` returns the plan of the left limit x -> x^-; it differs
    from the plain plan only where i2 jumps.
    """
    ab = lattice.product
    if ab >= 1:
        raise DensityError(f"alpha*beta = {ab} must be < 1")
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    alpha = _exact(lattice.alpha)
    xf = _exact(x)
    if not 0 <= xf < alpha:
        raise ValueError(f"offset x = {x} not in [0, {lattice.alpha})")
    r = math.floor(1 / (1 - ab))
    k1 = -(r + 1) * m - L
    k2 = (r + 1) * n + L
    i1 = math.floor((k1 + m - 1) / ab - xf / alpha) + 1
    d = (k2 - n + 1) / ab - xf / alpha
    if side == "algorithm":
        i2 = math.ceil(d) - 1
    elif side == "left":
        i2 = math.floor(d)
    else:
        raise ValueError(f"unknown side {side!r}")
    return SupportPlan(r, k1, k2, i1, i2, L, float(x))


def _row_points(plan: SupportPlan, lattice: LatticeParams) -> np.ndarray:
    return plan.x + lattice.a * np.arange(plan.i1, plan.i2 + 1)


def build_P(w: TpfftWindow, plan: SupportPlan, lattice: LatticeParams, cols=None) -> np.ndarray:
    """Matrix p_{i,k} = g(x + alpha*i - k/beta); ``cols`` overrides k1..k2."""
    ks = np.arange(plan.k1, plan.k2 + 1) if cols is None else np.asarray(cols)
    xs = _row_points(plan, lattice)
    return np.asarray(eval_g(w, xs[:, None] - ks[None, :] / lattice.b))


def left_inverse(P: np.ndarray, tol: float = LEFT_INVERSE_TOL) -> tuple[np.ndarray, float]:
    """Minimum-norm left inverse via rank-revealing least squares.

    Solves P^T Z = I; the rows of Z^T are the rows of the pseudoinverse.
    """
    ncols = P.shape[1]
    Z, _, rank, sv = scipy.linalg.lstsq(P.T, np.eye(ncols), cond=RANK_RTOL, lapack_driver="gelsd")
    if rank < ncols:
        raise RankDeficient(f"numerical rank {rank} < {ncols} columns (sigma_min/sigma_max = {sv[-1] / sv[0]:.2e})")
    pinv = Z.T
    residual = float(np.max(np.abs(pinv @ P - np.eye(ncols))))
    if not residual < tol:
        raise LeftInverseResidual(f"max |P^+ P - I| = {residual:.2e} exceeds {tol:.0e}")
    return pinv, residual


def _mp_exact(v):
    f = _exact(v)
    return mpmath.mpf(f.numerator) / f.denominator


def _build_P_mp(w: TpfftWindow, plan: SupportPlan, lattice: LatticeParams):
    """The collocation matrix with entries evaluated in mpmath precision."""
    deltas = [mpmath.mpf(d) for d in w.deltas]
    weights = []
    for i, di in enumerate(deltas):
        prod = mpmath.mpf(1)
        for k, dk in enumerate(deltas):
            if k != i:
                prod *= 1 - dk / di
        weights.append(w.scale / (prod * abs(di)))
    alpha, beta, x = _mp_exact(lattice.alpha), _mp_exact(lattice.beta), _mp_exact(plan.x)
    P = mpmath.matrix(plan.rows, plan.cols)
    for r, i in enumerate(range(plan.i1, plan.i2 + 1)):
        for c, k in enumerate(range(plan.k1, plan.k2 + 1)):
            t = x + alpha * i - k / beta
            val = mpmath.mpf(0)
            for d, wt in zip(deltas, weights):
                if t * d > 0:
                    val += wt * mpmath.exp(-abs(t / d))
                elif t == 0:
                    val += wt / 2
            P[r, c] = val
    return P


def left_inverse_extended(w: TpfftWindow, plan: SupportPlan, lattice: LatticeParams,
                          dps: int = EXTENDED_DPS) -> tuple[np.ndarray, float]:
    """Pseudoinverse rows of P computed with ``dps`` decimal digits.

    Used when P is too ill-conditioned for double precision.  The rank
    cutoff scales with the working precision (relative 10^-(dps-10)).
    """
    with mpmath.workdps(dps):
        P = _build_P_mp(w, plan, lattice)
        sv = mpmath.svd_r(P, compute_uv=False)
        smax = max(abs(s) for s in sv)
        smin = min(abs(s) for s in sv)
        if smin <= smax * mpmath.mpf(10) ** (-(dps - 10)):
            raise RankDeficient(
                f"P is rank deficient even at {dps} digits (sigma_min/sigma_max = {float(smin / smax):.2e})"
            )
        Q, R = mpmath.qr(P, mode="skinny")
        pinv = mpmath.inverse(R) * Q.T
        E = pinv * P
        residual = max(abs(E[i, j] - (1 if i == j else 0)) for i in range(plan.cols) for j in range(plan.cols))
        out = np.array([[float(pinv[i, j]) for j in range(plan.rows)] for i in range(plan.cols)])
    residual = float(residual)
    if not residual < LEFT_INVERSE_TOL:
        raise LeftInverseResidual(f"max |P^+ P - I| = {residual:.2e} exceeds {LEFT_INVERSE_TOL:.0e}")
    return out, residual


class DualAt(NamedTuple):
    i1: int
    i2: int
    values: np.ndarray
    plan: SupportPlan
    residual: float
    precision: str


def dual_at(w: TpfftWindow, lattice: LatticeParams, L: int, x=0, side: str = "algorithm",
            precision: str = "auto") -> DualAt:
    """Values gamma(x + alpha*i), i1 <= i <= i2, at one offset x.

    ``precision="auto"`` works in double precision and repeats the
    computation in extended precision only if the rank or left-inverse check
    fails there; "double" and "extended" force one route.
    """
    plan = plan_support(lattice, w.m, w.n, L, x, side)
    used = "double"
    if precision == "extended":
        pinv, residual = left_inverse_extended(w, plan, lattice)
        used = "extended"
    else:
        try:
            pinv, residual = left_inverse(build_P(w, plan, lattice))
        except (RankDeficient, LeftInverseResidual):
            if precision == "double":
                raise
            pinv, residual = left_inverse_extended(w, plan, lattice)
            used = "extended"
    values = lattice.b * pinv[plan.k0]
    return DualAt(plan.i1, plan.i2, values, plan, residual, used)


def biorthogonality(w: TpfftWindow, lattice: LatticeParams, d: DualAt, extra: int = 3):
    """Products v . w_k for k1-extra <= k <= k2+extra, with v = gamma/beta.

    Returns (ks, products); the products should be 1 at k = 0 and 0 elsewhere.
    """
    ks = np.arange(d.plan.k1 - extra, d.plan.k2 + extra + 1)
    W = build_P(w, d.plan, lattice, cols=ks)
    return ks, (d.values / lattice.b) @ W


# -- Schoenberg-Whitney ----------------------------------------------------------

def sw_check(xs: Sequence[float], ys: Sequence[float], m: int, n: int) -> bool:
    """y_{i-n} < x_i < y_{i+m} for 1 <= i <= N, with y_k = -inf (k <= 0), +inf (k > N)."""
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} points against {len(ys)} knots")
    N = len(xs)

    def y(k):
        if k <= 0:
            return -math.inf
        if k > N:
            return math.inf
        return ys[k - 1]

    return all(y(i - n) < xs[i - 1] < y(i + m) for i in range(1, N + 1))


def sw_select(xs: Sequence[float], ys: Sequence[float], m: int, n: int) -> Optional[list[int]]:
    """Greedy choice of increasing row indices whose points satisfy sw_check against ys.

    Each step takes the earliest admissible point, which is optimal for this
    kind of interval matching.  Returns None when no selection exists.
    """
    N = len(ys)

    def y(k):
        if k <= 0:
            return -math.inf
        if k > N:
            return math.inf
        return ys[k - 1]

    chosen: list[int] = []
    j = 0
    for i in range(1, N + 1):
        while j < len(xs) and not xs[j] > y(i - n):
            j += 1
        if j == len(xs) or not xs[j] < y(i + m):
            return None
        chosen.append(j)
        j += 1
    return chosen


def sw_select_exhaustive(xs, ys, m, n) -> Optional[list[int]]:
    """Brute-force counterpart of sw_select (small sizes only)."""
    for combo in itertools.combinations(range(len(xs)), len(ys)):
        if sw_check([xs[c] for c in combo], ys, m, n):
            return list(combo)
    return None


def plan_nodes(plan: SupportPlan, lattice: LatticeParams) -> tuple[np.ndarray, np.ndarray]:
    """Row points x_i and column knots y_k = k/beta of the collocation matrix."""
    return _row_points(plan, lattice), np.arange(plan.k1, plan.k2 + 1) / lattice.b


# -- tables over offsets ---------------------------------------------------------

@dataclass(frozen=True)
class DualEntry:
    i1: int
    i2: int
    values: np.ndarray
    residual: float
    precision: str = "double"


@dataclass(frozen=True)
class DualWindowTable:
    """gamma(x + alpha*i) for every tabulated offset x.

    Offsets where i2 jumps store the left limit (x -> x^-); i1 is already
    left-continuous under the floor rule.
    """
    lattice: LatticeParams
    L: int
    x_grid: tuple
    entries: tuple
    m: int = 0
    n: int = 0
    jumps: tuple = field(default=())

    def support(self) -> tuple[float, float]:
        a = self.lattice.a
        lo = min(float(x) + a * e.i1 for x, e in zip(self.x_grid, self.entries))
        hi = max(float(x) + a * e.i2 for x, e in zip(self.x_grid, self.entries))
        return lo, hi

    def bound(self) -> tuple[float, float]:
        return support_bound(self.lattice, self.m, self.n, self.L)

    def max_residual(self) -> float:
        return max(e.residual for e in self.entries)

    def rows(self):
        """(x_offset, i, support_point, value) in offset-major order."""
        a = self.lattice.a
        for x, e in zip(self.x_grid, self.entries):
            for i, v in zip(range(e.i1, e.i2 + 1), e.values):
                yield float(x), i, float(x) + a * i, float(v)

    def lookup(self, points) -> np.ndarray:
        """gamma at arbitrary points whose offset mod alpha is tabulated."""
        a = self.lattice.a
        grid = np.array([float(x) for x in self.x_grid])
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape)
        for idx in np.ndindex(pts.shape):
            t = pts[idx]
            i = math.floor(t / a)
            x = t - a * i
            j = int(np.argmin(np.abs(grid - x)))
            if abs(grid[j] - x) > 1e-12 * max(a, 1.0):
                if abs(grid[j] - x - a) <= 1e-12 * max(a, 1.0):
                    i -= 1
                else:
                    raise OffsetNotTabulated(f"offset {x} of point {t} is not in the table")
            e = self.entries[j]
            if e.i1 <= i <= e.i2:
                out[idx] = e.values[i - e.i1]
        return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TPGABOR_THREADS", "1")))
    except ValueError:
        return 1


def jump_offsets(lattice: LatticeParams, m: int, n: int, L: int) -> list[Fraction]:
    """Offsets in [0, alpha) where i1 or i2 changes."""
    ab = lattice.product
    alpha = _exact(lattice.alpha)
    r = math.floor(1 / (1 - ab))
    k1 = -(r + 1) * m - L
    k2 = (r + 1) * n + L
    out = set()
    for c in ((k1 + m - 1) / ab, (k2 - n + 1) / ab):
        frac = c - math.floor(c)
        out.add(alpha * frac)
    return sorted(out)


def _keyed_values(w, lattice, L, x, anchor):
    a = lattice.a
    d = dual_at(w, lattice, L, x)
    pts = x + a * np.arange(d.i1, d.i2 + 1)
    return {int(round((t - anchor) / a)): v for t, v in zip(pts, d.values)}


def jump_sizes(w: TpfftWindow, lattice: LatticeParams, L: int, eps: float = 1e-9) -> list[tuple[float, float]]:
    """Largest |gamma(t+) - gamma(t-)| over the jump points t = x* + alpha*Z.

    One-sided values are computed at x* -+ eps, so the continuous variation
    contributes only O(eps).
    """
    a = lattice.a
    out = []
    for xs in jump_offsets(lattice, w.m, w.n, L):
        xs = float(xs)
        left_x = xs - eps if xs - eps >= 0 else xs - eps + a
        right_x = xs + eps if xs + eps < a else xs + eps - a
        left = _keyed_values(w, lattice, L, left_x, xs)
        right = _keyed_values(w, lattice, L, right_x, xs)
        keys = set(left) | set(right)
        out.append((xs, max(abs(left.get(k, 0.0) - right.get(k, 0.0)) for k in keys)))
    return out


def dual_table(w: TpfftWindow, lattice: LatticeParams, L: int, x_count: Optional[int] = None,
               x_values: Optional[Sequence] = None, jumps: bool = False) -> DualWindowTable:
    """Run the per-offset computation over a grid of offsets.

    Give either ``x_count`` (uniform offsets p*alpha/x_count) or explicit
    ``x_values``.  TPGABOR_THREADS sets the worker count.
    """
    if x_values is None:
        if not x_count or x_count < 1:
            raise ValueError("x_count must be >= 1")
        alpha = _exact(lattice.alpha)
        x_values = [alpha * p / x_count for p in range(x_count)]
    xs = list(x_values)

    def one(x):
        d = dual_at(w, lattice, L, x, side="left")
        return DualEntry(d.i1, d.i2, d.values, d.residual, d.precision)

    nthreads = _threads()
    if nthreads > 1 and len(xs) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            entries = list(pool.map(one, xs))
    else:
        entries = [one(x) for x in xs]
    jump_info = tuple(jump_sizes(w, lattice, L)) if jumps else ()
    return DualWindowTable(lattice, L, tuple(float(x) for x in xs), tuple(entries), w.m, w.n, jump_info)


# -- discrete Wexler-Raz -------------------------------------------------------------

def wexler_raz_discrete(g_seq: SampledSignal, gamma_seq: SampledSignal, a: int, M: int,
                        kmax: int, lrange: Optional[int] = None) -> float:
    """Max deviation of <gamma, M_{l/a} T_{kM} g> from (a/M) delta_k0 delta_l0.

    Over |k| <= kmax and l = 0..lrange-1 (default a).
    """
    lrange = a if lrange is None else lrange
    gs, gv = g_seq.start, np.asarray(g_seq.values)
    cs, cv = gamma_seq.start, np.asarray(gamma_seq.values)
    worst = 0.0
    for k in range(-kmax, kmax + 1):
        lo = max(cs, gs + k * M)
        hi = min(cs + len(cv), gs + k * M + len(gv))
        t = np.arange(lo, hi)
        for l in range(lrange):
            if hi > lo:
                prod = cv[t - cs] * np.conj(gv[t - k * M - gs]) * np.exp(-2j * np.pi * l * t / a)
                val = np.sum(prod)
            else:
                val = 0.0
            target = a / M if (k == 0 and l == 0) else 0.0
            worst = max(worst, abs(val - target))
    return float(worst)
