"""Totally positive functions of finite type (TPFFT).

A TPFFT is given by its Fourier transform

    ghat(xi) = C * prod_k (1 + 2*pi*j*delta_k*xi)^(-1)

with nonzero real pole parameters ``delta_k``.  For pairwise distinct
parameters the function itself is a finite sum of one-sided exponentials,
which is what :func:`eval_g` evaluates.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import NonpositiveScale, RepeatedPoles, TooFewPoles, ZeroDelta

# relative gap below which two poles count as repeated
DISTINCT_RTOL = 1e-12
# default relative split used by separate_poles
PERTURB_EPS = 1e-7


def heaviside(x):
    """Unit step with h(0) = 1/2."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))
    return out if out.ndim else float(out)


def _same_pole(a: float, b: float) -> bool:
    return abs(a - b) < DISTINCT_RTOL * max(abs(a), abs(b))


def partial_fraction_coefficients(deltas: Sequence[float]) -> np.ndarray:
    """C_i = prod_{k != i} (1 - delta_k/delta_i)^(-1) for distinct poles.

    Factors are multiplied in order of increasing |1 - delta_k/delta_i|.
    """
    out = []
    for i, di in enumerate(deltas):
        factors = sorted((1.0 - dk / di for k, dk in enumerate(deltas) if k != i), key=abs)
        prod = 1.0
        for f in factors:
            prod *= f
        out.append(1.0 / prod)
    return np.array(out)


@dataclass(frozen=True)
class TpfftWindow:
    deltas: tuple[float, ...]
    scale: float = 1.0

    def __post_init__(self):
        if len(self.deltas) < 2:
            raise TooFewPoles(f"need at least 2 pole parameters, got {len(self.deltas)}")
        for d in self.deltas:
            if d == 0:
                raise ZeroDelta("pole parameter delta = 0 is not allowed")
            if not math.isfinite(d):
                raise ValueError(f"pole parameter {d!r} is not finite")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise NonpositiveScale(f"scale must be positive and finite, got {self.scale!r}")

    @property
    def m(self) -> int:
        """Number of positive pole parameters."""
        return sum(1 for d in self.deltas if d > 0)

    @property
    def n(self) -> int:
        """Number of negative pole parameters."""
        return sum(1 for d in self.deltas if d < 0)

    @property
    def order(self) -> int:
        return len(self.deltas)

    @property
    def distinct(self) -> bool:
        d = self.deltas
        return not any(_same_pole(d[i], d[k]) for i in range(len(d)) for k in range(i))

    @property
    def coefficients(self) -> np.ndarray:
        """Partial fraction coefficients C_i (without the scale)."""
        self._require_distinct()
        return partial_fraction_coefficients(self.deltas)

    @property
    def weights(self) -> np.ndarray:
        """scale * C_i / |delta_i|, the amplitudes of the exponential branches."""
        return self.scale * self.coefficients / np.abs(self.deltas)

    @property
    def is_even(self) -> bool:
        pos = sorted(d for d in self.deltas if d > 0)
        neg = sorted(-d for d in self.deltas if d < 0)
        return len(pos) == len(neg) and all(_same_pole(p, q) for p, q in zip(pos, neg))

    @property
    def max_delta(self) -> float:
        return max(abs(d) for d in self.deltas)

    def decay_constant(self) -> float:
        """Constant C_b with |g(x)| <= C_b * exp(-|x| / max|delta|).

        Repeated poles get a crude bound from the slowest exponential with
        doubled time constant.
        """
        if self.distinct:
            return float(np.sum(np.abs(self.weights)))
        return self.scale * self.order * 2.0 ** self.order / min(abs(d) for d in self.deltas)

    def decay_rate(self) -> float:
        rate = 1.0 / self.max_delta
        return rate if self.distinct else rate / 2.0

    def _require_distinct(self):
        if not self.distinct:
            raise RepeatedPoles(
                f"pole parameters {self.deltas} are not pairwise distinct; "
                "use the divided-difference routines or separate_poles()"
            )

    def to_dict(self) -> dict:
        return {"deltas": list(self.deltas), "scale": self.scale}


def make_window(deltas: Sequence, scale=1.0) -> TpfftWindow:
    """Build a window from pole parameters. Input order is preserved."""
    if len(deltas) < 2:
        raise TooFewPoles(f"need at least 2 pole parameters, got {len(deltas)}")
    if any(d == 0 for d in deltas):
        raise ZeroDelta("pole parameter delta = 0 is not allowed")
    if not scale > 0:
        raise NonpositiveScale(f"scale must be positive, got {scale!r}")
    return TpfftWindow(tuple(float(d) for d in deltas), float(scale))


def separate_poles(deltas: Sequence[float], eps: float = PERTURB_EPS) -> list[float]:
    """Split repeated poles: the j-th repeat of a value is scaled by (1 + j*eps)."""
    out: list[float] = []
    for d in deltas:
        d = float(d)
        j = sum(1 for e in deltas[: len(out)] if _same_pole(float(e), d))
        out.append(d * (1.0 + j * eps))
    return out


def parse_number(text: str) -> Fraction:
    """Parse '0.5', '-1', '1/3' exactly."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number or fraction: {text!r}") from exc


def parse_deltas(text: str) -> list[float]:
    """Parse a comma separated list such as '1,-1,1/2,-0.5'."""
    return [float(parse_number(t)) for t in text.split(",") if t.strip()]


def load_window(path) -> TpfftWindow:
    """Read a window file ``{"deltas": [...], "scale": 1.0}``.

    Entries may be JSON numbers or fraction strings.
    """
    data = json.loads(Path(path).read_text())
    deltas = [float(parse_number(str(d))) for d in data["deltas"]]
    return make_window(deltas, float(parse_number(str(data.get("scale", 1.0)))))


def eval_g(w: TpfftWindow, x):
    """Evaluate the window at ``x`` (scalar or array)."""
    w._require_distinct()
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    for d, wt in zip(w.deltas, w.weights):
        side = heaviside(x * d)
        # x*d > 0 means -x/d = -|x/d|; masking keeps the other side from overflowing
        out = out + wt * np.exp(-np.abs(x / d)) * side
    return out if out.ndim else float(out)


def fourier_g(w: TpfftWindow, xi):
    """C * prod_k (1 + 2*pi*j*delta_k*xi)^(-1)."""
    xi = np.asarray(xi, dtype=float)
    out = np.full(xi.shape, w.scale, dtype=complex)
    for d in w.deltas:
        out = out / (1.0 + 2j * np.pi * d * xi)
    return out if out.ndim else complex(out)
