"""Sampling and periodization of windows and dual windows."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DivisibilityError, OffsetNotTabulated
from .window import TpfftWindow, eval_g
from .zak import zak, zak_closed

TRUNC_REL = 1e-14


@dataclass(frozen=True)
class SampledSignal:
    """Values f(offset + step*n), n = 0..len-1; zero outside."""
    offset: float
    step: float
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    @property
    def start(self) -> int:
        """Integer index of the first sample (offset / step)."""
        return int(round(self.offset / self.step))

    @property
    def indices(self) -> np.ndarray:
        return self.start + np.arange(len(self.values))

    @property
    def points(self) -> np.ndarray:
        return self.offset + self.step * np.arange(len(self.values))


@dataclass(frozen=True)
class PeriodicSignal:
    """One period [0, period) sampled at step ``period/len(values)``."""
    period: float
    values: np.ndarray

    @property
    def step(self) -> float:
        return self.period / len(self.values)


def decay_radius(w: TpfftWindow, rel: float = TRUNC_REL) -> float:
    """Radius beyond which |g| < rel * max|g|, from the exponential decay bound."""
    if w.distinct:
        # the peak sits within a few time constants of 0 (one-sided windows vanish at 0)
        t = np.linspace(-4 * w.order * w.max_delta, 4 * w.order * w.max_delta, 4001)
        gmax = float(np.max(np.abs(eval_g(w, t))))
    else:
        gmax = w.scale
    ratio = w.decay_constant() / (rel * gmax)
    return max(w.max_delta, math.log(ratio) / w.decay_rate())


def sample(obj, h: float, start: int, stop: int) -> SampledSignal:
    """Values at h*k for start <= k < stop.

    ``obj`` is a :class:`TpfftWindow` or a dual-window table (anything with a
    ``lookup(points)`` method).
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    k = np.arange(start, max(start, stop))
    pts = h * k
    if isinstance(obj, TpfftWindow):
        vals = np.asarray(eval_g(obj, pts), dtype=float) if len(k) else np.zeros(0)
    else:
        vals = obj.lookup(pts)
    return SampledSignal(float(h * start), float(h), vals)


def sample_window(w: TpfftWindow, h: float = 1.0, rel: float = TRUNC_REL) -> SampledSignal:
    """Sample g on h*Z, truncated where the tail drops below rel * max|g|."""
    n = int(math.ceil(decay_radius(w, rel) / h))
    return sample(w, h, -n, n + 1)


def sample_dual(table) -> SampledSignal:
    """The sequence S gamma from a table tabulated at integer offsets 0..alpha-1."""
    alpha = table.lattice.alpha
    if Fraction(alpha).denominator != 1:
        raise DivisibilityError(f"alpha = {alpha} is not an integer; S gamma needs integer alpha")
    a = int(alpha)
    offsets = [float(x) for x in table.x_grid]
    if sorted(int(round(x)) for x in offsets) != list(range(a)) or any(x != round(x) for x in offsets):
        raise OffsetNotTabulated(f"table offsets {offsets} are not 0..{a - 1}")
    t_min = min(x + a * e.i1 for x, e in zip(offsets, table.entries))
    t_max = max(x + a * e.i2 for x, e in zip(offsets, table.entries))
    start, stop = int(t_min), int(t_max) + 1
    vals = np.zeros(stop - start)
    for x, e in zip(offsets, table.entries):
        t = (int(x) + a * np.arange(e.i1, e.i2 + 1)) - start
        vals[t] = e.values
    return SampledSignal(float(start), 1.0, vals)


def periodize_sequence(sig: SampledSignal, K: int) -> np.ndarray:
    """P_K of a finitely supported sequence on Z: entry t sums f(t + nK)."""
    if sig.step != 1.0:
        raise ValueError("periodize_sequence expects a sequence with step 1")
    out = np.zeros(K, dtype=np.asarray(sig.values).dtype)
    np.add.at(out, np.mod(sig.indices, K), sig.values)
    return out


def periodize_closed(w: TpfftWindow, K: float, x):
    """P_K g(x) = Z_K g(x, 0); confluent poles go through the divided difference."""
    val = zak(w, K, x, 0.0)
    return np.real(val) if np.ndim(val) else float(np.real(val))


def periodize_series(w: TpfftWindow, K: float, x, tol: float = 1e-16):
    """Direct truncated sum over translates g(x - kK)."""
    x = np.asarray(x, dtype=float)
    n = int(math.ceil(decay_radius(w, tol) / K)) + 2
    k = np.arange(-n, n + 1)
    vals = eval_g(w, x[..., None] - K * k)
    out = np.sum(vals, axis=-1)
    return out if out.ndim else float(out)


def qkn_window(w: TpfftWindow, K: int, N: int) -> np.ndarray:
    """Vector of length K*N with entries N^(-1/2) Z_K g(l/N, 0)."""
    l = np.arange(K * N)
    vals = np.real(zak_closed(w, K, l / N, 0.0))
    return vals / math.sqrt(N)


def periodic_window(w: TpfftWindow, K, h=1, normalize: bool = False) -> PeriodicSignal:
    """P_K S_h g, i.e. Z_K g(l h, 0) for l = 0..K/h-1.

    K/h must be an integer; the test is done on exact fractions.
    """
    ratio = Fraction(K) / Fraction(h)
    if ratio.denominator != 1:
        raise DivisibilityError(f"K/h = {ratio} is not an integer")
    n = int(ratio)
    pts = float(Fraction(h)) * np.arange(n)
    vals = np.real(np.asarray(zak(w, float(K), pts, 0.0)))
    if normalize:
        vals = vals * math.sqrt(float(Fraction(h)))
    return PeriodicSignal(float(K), vals)

