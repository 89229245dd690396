"""Gabor frames and compactly supported dual windows for totally positive
windows of finite type."""
from .discretize import (
    PeriodicSignal,
    SampledSignal,
    periodic_window,
    periodize_closed,
    periodize_sequence,
    qkn_window,
    sample,
    sample_dual,
    sample_window,
)
from .dual import (
    DualWindowTable,
    LatticeParams,
    SupportPlan,
    build_P,
    dual_at,
    dual_table,
    plan_support,
    sw_check,
    wexler_raz_discrete,
)
from .finite import (
    FiniteGaborSystem,
    canonical_dual,
    frame_bounds_finite,
    reconstruct,
    riesz_bounds_finite,
    synthesis_matrix,
    tf_shift_finite,
)
from .window import TpfftWindow, eval_g, fourier_g, heaviside, make_window
from .zak import ZakGrid, ZakZero, critical_bounds, find_zak_zero, zak_closed, zak_divdiff, zak_series

__version__ = "0.1.0"
