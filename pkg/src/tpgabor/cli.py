"""Command-line front end.

Each run prints a one-line JSON summary on stdout and writes its data
payload to ``--out``.  Exit status: 0 ok, 1 computation error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import discretize, dual, finite, zak
from .errors import TpgaborError, UsageError
from .export import write_table
from .window import TpfftWindow, eval_g, load_window, make_window, parse_number

COMMANDS = ("window", "zak", "dual", "frame-check", "reconstruct")
# flags whose values may start with '-'
_VALUE_FLAGS = ("--delta", "--range", "--x-values")


@dataclass
class RunConfig:
    command: str
    window: TpfftWindow
    out: Optional[str] = None
    fmt: str = "csv"
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _frac(flag):
    def conv(text):
        try:
            return parse_number(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag}: not a number or fraction: {text!r}")
    return conv


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tpgabor", description="Gabor frames with totally positive windows of finite type.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--delta", help="pole parameters, e.g. 1,-1,1/2,-1/2")
        sp.add_argument("--scale", type=_frac("--scale"), default=Fraction(1))
        sp.add_argument("--window-file", help='JSON file {"deltas": [...], "scale": 1.0}')
        sp.add_argument("--out", help="payload output file")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("window", help="evaluate, sample or periodize a window")
    common(sp)
    sp.add_argument("--range", help="interval lo:hi")
    sp.add_argument("--step", type=_frac("--step"), help="curve step on --range")
    sp.add_argument("--sample", type=_frac("--sample"), help="sampling step h")
    sp.add_argument("--period", type=_frac("--period"), help="periodization length K")

    sp = sub.add_parser("zak", help="Zak transform on the fundamental domain")
    common(sp)
    sp.add_argument("--alpha", type=_frac("--alpha"), required=True)
    sp.add_argument("--grid", default="64x64", help="NXxNXI")

    sp = sub.add_parser("dual", help="compactly supported dual window")
    common(sp)
    sp.add_argument("--alpha", type=_frac("--alpha"), required=True)
    sp.add_argument("--beta", type=_frac("--beta"), required=True)
    sp.add_argument("--L", type=int, default=0, dest="support_L")
    sp.add_argument("--xgrid", type=int, help="number of uniform offsets in [0, alpha)")
    sp.add_argument("--x-values", help="explicit offsets, e.g. 0,1")

    sp = sub.add_parser("frame-check", help="frame / Riesz bounds")
    common(sp)
    sp.add_argument("--space", choices=("cl", "l2", "tk"), default="cl")
    sp.add_argument("--L", type=int, dest="dim", help="dimension (cl) or period (tk)")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--M", type=int, required=True)

    sp = sub.add_parser("reconstruct", help="perfect reconstruction trials on C^L")
    common(sp)
    sp.add_argument("--L", type=int, dest="dim", required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--dual", choices=("algorithm", "canonical"), default="algorithm")
    sp.add_argument("--dual-L", type=int, default=0)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    return p


def _join_values(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _positive(flag, v):
    if v is None or v <= 0:
        raise UsageError(f"{flag} must be positive, got {v}")


def _divides(flag, num, den, what):
    if num % den:
        raise UsageError(f"{flag}: {what} = {num}/{den} is not an integer")


def parse_args(argv) -> RunConfig:
    ns = _build_parser().parse_args(_join_values(list(argv)))
    try:
        if ns.window_file:
            w = load_window(ns.window_file)
        elif ns.delta:
            w = make_window([float(parse_number(t)) for t in ns.delta.split(",") if t.strip()], float(ns.scale))
        else:
            raise UsageError("--delta or --window-file is required")
    except UsageError:
        raise
    except (TpgaborError, ValueError, OSError, KeyError) as exc:
        raise UsageError(f"--delta: {exc}") from exc

    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "delta", "scale", "window_file", "out", "fmt")}
    cmd = ns.command

    if cmd == "window":
        if ns.range is None and ns.sample is None and ns.period is None:
            raise UsageError("window needs --range/--step, --sample or --period")
        if ns.range is not None:
            try:
                lo, hi = (parse_number(t) for t in ns.range.split(":"))
            except ValueError:
                raise UsageError(f"--range: expected lo:hi, got {ns.range!r}")
            if not lo < hi:
                raise UsageError("--range: lo must be below hi")
            opts["range"] = (lo, hi)
            if ns.sample is None and ns.period is None:
                _positive("--step", ns.step)
        if ns.sample is not None:
            _positive("--sample", ns.sample)
        if ns.period is not None:
            _positive("--period", ns.period)
            h = ns.sample if ns.sample is not None else Fraction(1)
            if (ns.period / h).denominator != 1:
                raise UsageError(f"--period: K/h = {ns.period}/{h} is not an integer")
    elif cmd == "zak":
        _positive("--alpha", ns.alpha)
        try:
            nx, nxi = (int(t) for t in ns.grid.lower().split("x"))
        except ValueError:
            raise UsageError(f"--grid: expected NXxNXI, got {ns.grid!r}")
        if nx < 1 or nxi < 1:
            raise UsageError("--grid sizes must be positive")
        opts["grid"] = (nx, nxi)
    elif cmd == "dual":
        _positive("--alpha", ns.alpha)
        _positive("--beta", ns.beta)
        if ns.alpha * ns.beta >= 1:
            raise UsageError(f"--beta: alpha*beta = {ns.alpha * ns.beta} must be < 1")
        if ns.support_L < 0:
            raise UsageError("--L must be >= 0")
        if (ns.xgrid is None) == (ns.x_values is None):
            raise UsageError("dual needs exactly one of --xgrid or --x-values")
        if ns.xgrid is not None and ns.xgrid < 1:
            raise UsageError("--xgrid must be >= 1")
        if ns.x_values is not None:
            try:
                xs = [parse_number(t) for t in ns.x_values.split(",")]
            except ValueError as exc:
                raise UsageError(f"--x-values: {exc}")
            if any(not 0 <= x < ns.alpha for x in xs):
                raise UsageError(f"--x-values must lie in [0, {ns.alpha})")
            opts["x_values"] = xs
    elif cmd in ("frame-check", "reconstruct"):
        _positive("--a", ns.a)
        _positive("--M", ns.M)
        if cmd == "reconstruct" or ns.space in ("cl", "tk"):
            _positive("--L", ns.dim)
            _divides("--a", ns.dim, ns.a, "L/a")
            _divides("--M", ns.dim, ns.M, "L/M")
        if cmd == "frame-check" and ns.space == "tk" and ns.a != ns.M:
            raise UsageError("--space tk is checked only at critical density (--a equal to --M)")
        if cmd == "reconstruct":
            if ns.trials < 1:
                raise UsageError("--trials must be >= 1")
            if ns.dual == "algorithm" and ns.a >= ns.M:
                raise UsageError("--a: the algorithmic dual needs a/M < 1")
            if ns.dual_L < 0:
                raise UsageError("--dual-L must be >= 0")
    return RunConfig(cmd, w, ns.out, ns.fmt, opts)


# -- commands ----------------------------------------------------------------------

def _write(cfg, columns, rows):
    if cfg.out:
        return write_table(cfg.out, columns, rows, cfg.fmt)
    return 0


def _cmd_window(cfg):
    w, o = cfg.window, cfg.options
    if o["sample"] is None and o["period"] is None:
        lo, hi = o["range"]
        step = o["step"]
        n = int((hi - lo) / step)
        xs = [lo + step * k for k in range(n + 1)]
        vals = np.atleast_1d(eval_g(w, np.array([float(x) for x in xs])))
        rows = list(zip((float(x) for x in xs), vals))
        _write(cfg, ("x", "value"), rows)
        return {"points": len(rows), "max": float(vals.max()), "g0": float(eval_g(w, 0.0))}
    h = o["sample"] if o["sample"] is not None else Fraction(1)
    if o["period"] is not None:
        sig = discretize.periodic_window(w, o["period"], h)
        idx = range(len(sig.values))
        vals = sig.values
    else:
        if o.get("range") is not None:
            lo, hi = o["range"]
            start, stop = int(np.ceil(lo / h)), int(np.floor(hi / h)) + 1
            sig = discretize.sample(w, float(h), start, stop)
        else:
            sig = discretize.sample_window(w, float(h))
        idx, vals = sig.indices, sig.values
    rows = list(zip((int(i) for i in idx), vals))
    _write(cfg, ("index", "value"), rows)
    return {"points": len(rows), "step": float(h), "sum": float(np.sum(vals))}


def _cmd_zak(cfg):
    w, alpha = cfg.window, float(cfg.options["alpha"])
    nx, nxi = cfg.options["grid"]
    grid = zak.zak_grid(w, alpha, nx, nxi)
    a2 = grid.abs2()
    rows = []
    for p, x in enumerate(grid.x):
        for q, xi in enumerate(grid.xi):
            v = grid.values[p, q]
            rows.append((x, xi, v.real, v.imag, a2[p, q]))
    _write(cfg, ("x", "xi", "re", "im", "abs2"), rows)
    summary = {"min_abs2": float(a2.min()), "max_abs2": float(a2.max())}
    z = zak.find_zak_zero(w, alpha)
    summary["zero"] = {"x0": z.x0, "xi0": z.xi0, "residual": z.residual}
    return summary


def _cmd_dual(cfg):
    w, o = cfg.window, cfg.options
    lat = dual.LatticeParams(o["alpha"], o["beta"])
    table = dual.dual_table(w, lat, o["support_L"], x_count=o["xgrid"], x_values=o.get("x_values"), jumps=True)
    _write(cfg, ("x_offset", "i", "support_point", "value"), table.rows())
    lo, hi = table.support()
    blo, bhi = table.bound()
    return {
        "support": [lo, hi],
        "bound": [blo, bhi],
        "support_ok": bool(blo <= lo and hi <= bhi),
        "max_left_inverse_residual": table.max_residual(),
        "jumps": [{"x": x, "size": s} for x, s in table.jumps],
        "max_jump": max((s for _, s in table.jumps), default=0.0),
    }


def _cmd_frame_check(cfg):
    w, o = cfg.window, cfg.options
    a, M, space = o["a"], o["M"], o["space"]
    if space == "cl":
        L = o["dim"]
        sys_ = finite.FiniteGaborSystem(L, a, M, discretize.qkn_window(w, L, 1))
        fb = finite.frame_bounds_finite(sys_)
        rb = finite.riesz_bounds_finite(sys_)
        if cfg.out:
            G = finite.synthesis_matrix(sys_)
            rows = ((r, c, G[r, c].real, G[r, c].imag) for r in range(G.shape[0]) for c in range(G.shape[1]))
            _write(cfg, ("row", "col", "re", "im"), rows)
        return {"space": space, "A": fb.lower, "B": fb.upper, "is_frame": fb.ok,
                "riesz_A": rb.lower, "riesz_B": rb.upper, "is_riesz": rb.ok}
    if a == M:
        setting = "sequence" if space == "l2" else "periodic"
        cb = zak.critical_bounds(w, M, o.get("dim"), setting)
        return {"space": space, "A": cb.A, "B": cb.B, "is_frame": cb.is_frame, "argmin": list(cb.argmin)}
    if a > M:
        return {"space": space, "is_frame": False, "reason": "a/M > 1"}
    lat = dual.LatticeParams(Fraction(a), Fraction(1, M))
    table = dual.dual_table(w, lat, 0, x_values=list(range(a)))
    dev = dual.wexler_raz_discrete(discretize.sample_window(w), discretize.sample_dual(table), a, M, kmax=20)
    return {"space": space, "is_frame": dev < 1e-8, "wexler_raz_deviation": dev}


def _cmd_reconstruct(cfg):
    w, o = cfg.window, cfg.options
    L, a, M = o["dim"], o["a"], o["M"]
    sys_g = finite.FiniteGaborSystem(L, a, M, discretize.qkn_window(w, L, 1))
    if o["dual"] == "canonical":
        gamma = finite.canonical_dual(sys_g)
    else:
        lat = dual.LatticeParams(Fraction(a), Fraction(1, M))
        table = dual.dual_table(w, lat, o["dual_L"], x_values=list(range(a)))
        gamma = discretize.periodize_sequence(discretize.sample_dual(table), L)
    sys_d = finite.FiniteGaborSystem(L, a, M, gamma)
    errs = [finite.reconstruct(f, sys_g, sys_d)[1] for f in finite.random_signals(L, o["trials"], o["seed"])]
    _write(cfg, ("trial", "rel_error"), enumerate(errs))
    return {"trials": len(errs), "seed": o["seed"], "generator": "numpy PCG64",
            "max_rel_error": max(errs), "mean_rel_error": float(np.mean(errs))}


_DISPATCH = {
    "window": _cmd_window,
    "zak": _cmd_zak,
    "dual": _cmd_dual,
    "frame-check": _cmd_frame_check,
    "reconstruct": _cmd_reconstruct,
}


def run(cfg: RunConfig) -> int:
    try:
        summary = _DISPATCH[cfg.command](cfg)
    except UsageError as exc:
        print(json.dumps({"command": cfg.command, "status": "error", "code": exc.code, "message": str(exc)}))
        return 2
    except TpgaborError as exc:
        print(json.dumps({"command": cfg.command, "status": "error", "code": exc.code, "message": str(exc)}))
        return 1
    print(json.dumps({"command": cfg.command, "status": "ok", **summary}))
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"tpgabor: error: {exc}", file=sys.stderr)
        print(json.dumps({"status": "error", "code": exc.code, "message": str(exc)}))
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
