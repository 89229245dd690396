"""Gabor systems on C^L.

Column (k, l) of the synthesis matrix is M_{l/M} T_{ka} g, i.e.
t -> g((t - k a) mod L) * exp(2 pi j l t / M), stored at index k*M + l.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DivisibilityError, ShapeMismatch

REL_TOL = 1e-12


@dataclass(frozen=True)
class FiniteGaborSystem:
    L: int
    a: int
    M: int
    window: np.ndarray

    def __post_init__(self):
        if len(self.window) != self.L:
            raise ShapeMismatch(f"window has length {len(self.window)}, expected L = {self.L}")
        if self.a <= 0 or self.L % self.a:
            raise DivisibilityError(f"L/a = {self.L}/{self.a} is not an integer")
        if self.M <= 0 or self.L % self.M:
            raise DivisibilityError(f"L/M = {self.L}/{self.M} is not an integer")

    @property
    def N(self) -> int:
        return self.L // self.a

    @property
    def size(self) -> int:
        return self.N * self.M


def tf_shift_finite(f, k: int, l: int, L: int, M: int) -> np.ndarray:
    """(M_{l/M} T_k f)(t) = f((t - k) mod L) exp(2 pi j l t / M)."""
    if L % M:
        raise DivisibilityError(f"L/M = {L}/{M} is not an integer")
    f = np.asarray(f)
    t = np.arange(L)
    return f[(t - k) % L] * np.exp(2j * np.pi * l * t / M)


def synthesis_matrix(sys: FiniteGaborSystem) -> np.ndarray:
    L, a, M = sys.L, sys.a, sys.M
    g = np.asarray(sys.window)
    t = np.arange(L)
    out = np.empty((L, sys.size), dtype=complex)
    mods = np.exp(2j * np.pi * np.outer(t, np.arange(M)) / M)
    for k in range(sys.N):
        shifted = g[(t - k * a) % L]
        out[:, k * M:(k + 1) * M] = shifted[:, None] * mods
    return out


class Bounds(NamedTuple):
    lower: float
    upper: float
    ok: bool


def frame_bounds_finite(sys: FiniteGaborSystem) -> Bounds:
    """Extreme eigenvalues of the frame operator G G^H."""
    G = synthesis_matrix(sys)
    ev = np.linalg.eigvalsh(G @ G.conj().T)
    A, B = max(float(ev[0]), 0.0), float(ev[-1])
    return Bounds(A, B, A > REL_TOL * B)


def riesz_bounds_finite(sys: FiniteGaborSystem) -> Bounds:
    """Extreme eigenvalues of the Gram matrix G^H G."""
    G = synthesis_matrix(sys)
    ev = np.linalg.eigvalsh(G.conj().T @ G)
    A, B = max(float(ev[0]), 0.0), float(ev[-1])
    return Bounds(A, B, A > REL_TOL * B)


def canonical_dual(sys: FiniteGaborSystem) -> np.ndarray:
    """S^{-1} g with S the frame operator."""
    G = synthesis_matrix(sys)
    S = G @ G.conj().T
    return np.linalg.solve(S, np.asarray(sys.window, dtype=complex))


def reconstruct(f, sys_g: FiniteGaborSystem, sys_gamma: FiniteGaborSystem):
    """Analyze with g, synthesize with gamma; returns (f_hat, relative error)."""
    if (sys_g.L, sys_g.a, sys_g.M) != (sys_gamma.L, sys_gamma.a, sys_gamma.M):
        raise ShapeMismatch("analysis and synthesis systems differ in L, a or M")
    f = np.asarray(f)
    if f.shape != (sys_g.L,):
        raise ShapeMismatch(f"signal has shape {f.shape}, expected ({sys_g.L},)")
    coeffs = synthesis_matrix(sys_g).conj().T @ f
    f_hat = synthesis_matrix(sys_gamma) @ coeffs
    return f_hat, float(np.linalg.norm(f - f_hat) / np.linalg.norm(f))


def random_signals(L: int, trials: int, seed: int) -> np.ndarray:
    """Complex Gaussian test signals from numpy's PCG64 generator."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal((trials, L)) + 1j * rng.standard_normal((trials, L))
