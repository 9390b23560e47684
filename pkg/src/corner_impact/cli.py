"""Command-line front end: ``run``, ``sweep``, ``golden`` and ``analyze``.

Exit codes: 0 on success, 1 on usage or domain errors, 2 when a golden
comparison finds failing rows.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .analysis import beta_of_k, build_h1, estimate_rate, spectral_radius
from .errors import DomainError
from .geometry import (
    VelocityXY,
    make_corner,
    normalized,
    parse_angle,
    xy_to_angular,
    xy_to_xieta,
)
from .harness import (
    ToleranceSpec,
    compare_golden,
    default_grid,
    emit_table,
    expand_grid,
    load_golden,
    load_grid,
    run_cases,
)
from .rules import RestitutionMode, check_eps
from .solvers import DEFAULT_NMAX, DEFAULT_S, DEFAULT_SV, RunConfig, run_na, run_ta

PROG = "corner-impact"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _FlagError(DomainError):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")


def _flag(flag: str, fn, *args):
    try:
        return fn(*args)
    except (DomainError, ValueError) as exc:
        raise _FlagError(flag, str(exc)) from None


def _parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise DomainError(f"expected 'x,y', got {text!r}")
    return float(parts[0]), float(parts[1])


def _fmt(x: float) -> str:
    return repr(float(x))


def _describe(v: VelocityXY, corner, rep: str) -> str:
    if rep == "xieta":
        w = xy_to_xieta(v, corner)
        return f"(xi_dot={_fmt(w.xi_dot)}, eta_dot={_fmt(w.eta_dot)})"
    if rep == "angle":
        if v.vx == 0.0 and v.vy == 0.0:
            return "(speed=0.0, phi=undefined)"
        a = xy_to_angular(v)
        return f"(speed={_fmt(a.speed)}, phi={_fmt(a.phi)})"
    return f"({_fmt(v.vx)}, {_fmt(v.vy)})"


def _cmd_run(args, out) -> int:
    eps = _flag("--eps", check_eps, args.eps)
    corner = _flag("--alpha", lambda s: make_corner(parse_angle(s)), args.alpha)
    x, y = _flag("--v0", _parse_pair, args.v0)
    v0 = _flag("--v0", VelocityXY, x, y)
    mode = RestitutionMode(eps)
    normalize = args.normalize if args.normalize is not None else args.mode == "na"
    if normalize:
        v0 = _flag("--v0", normalized, v0)
    if args.mode == "ta":
        nmax = _flag("--nmax", _positive_int, args.nmax if args.nmax is not None else 1_000_000)
        res = run_ta(v0, mode, corner, n_cap=nmax, trace=args.trace)
    else:
        cfg = _flag("--S", RunConfig, mode, corner, args.S, args.Sv,
                    args.nmax if args.nmax is not None else DEFAULT_NMAX, args.trace, normalize)
        res = run_na(v0, cfg)
    rep = args.repr
    print(f"mode={args.mode} eps={eps:g} alpha={_fmt(corner.alpha)} k={_fmt(corner.k)}", file=out)
    print(f"v0={_describe(res.v0, corner, rep)}", file=out)
    print(f"zone0={res.zone0.value}", file=out)
    print(f"v_final={_describe(res.v_final, corner, rep)}", file=out)
    print(f"norm_final={_fmt(res.norm_final)}", file=out)
    print(f"steps={res.steps}", file=out)
    print(f"stop={res.stop.value}", file=out)
    if res.trace is not None:
        print("n\tzone\tvelocity", file=out)
        for e in res.trace:
            print(f"{e.index}\t{e.zone.value}\t{_describe(e.xy, corner, rep)}", file=out)
    return 0


def _positive_int(n) -> int:
    n = int(n)
    if n < 1:
        raise DomainError(f"must be a positive integer, got {n}")
    return n


def _cmd_sweep(args, out) -> int:
    spec = load_grid(args.grid) if args.grid else default_grid()
    cases = expand_grid(spec)
    if args.eps is not None:
        eps = _flag("--eps", check_eps, args.eps)
        cases = [c for c in cases if c.eps == eps]
    if args.alpha is not None:
        alpha = _flag("--alpha", parse_angle, args.alpha)
        cases = [c for c in cases if c.corner.alpha == alpha]
    cfg = _flag("--S", RunConfig, RestitutionMode(), make_corner(parse_angle("pi/4")),
                args.S, args.Sv, args.nmax if args.nmax is not None else DEFAULT_NMAX)
    rows = run_cases(cases, cfg)
    text = emit_table(rows, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


def _cmd_golden(args, out) -> int:
    golden = load_golden(args.golden)
    cfg = _flag("--S", RunConfig, RestitutionMode(), make_corner(parse_angle("pi/4")),
                args.S, args.Sv, args.nmax if args.nmax is not None else DEFAULT_NMAX)
    rows = run_cases(expand_grid(default_grid()), cfg)
    tol = ToleranceSpec(v_abs=args.tol_v, norm_abs=args.tol_norm, step_rel=args.tol_steps)
    report = compare_golden(rows, golden, tol)
    out.write(report.to_text())
    if args.report_json:
        Path(args.report_json).write_text(report.to_json(), encoding="utf-8")
    return 0 if report.passed else 2


def _split(text: str) -> list[str]:
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _cmd_analyze(args, out) -> int:
    eps_list = [_flag("--eps", float, e) for e in _split(args.eps)]
    for e in eps_list:
        if not 0.0 < e < 1.0:
            raise _FlagError("--eps", f"convergence analysis needs eps in (0, 1), got {e!r}")
    corners = [_flag("--alpha", lambda s: make_corner(parse_angle(s)), a) for a in _split(args.alpha)]
    header = "eps\talpha\tk\tbeta\tbranch\trho_H1"
    if args.with_run:
        header += "\tsteps\tstop\trate_fit"
    print(header, file=out)
    for e in eps_list:
        for c in corners:
            h1 = _flag("--alpha", build_h1, e, beta_of_k(c.k))
            rho = spectral_radius(h1)
            line = f"{e:g}\t{c.alpha:.6g}\t{c.k:.6g}\t{c.beta:.6g}\t{h1.branch}\t{rho:.6g}"
            if args.with_run:
                if args.v0:
                    v0 = VelocityXY(*_flag("--v0", _parse_pair, args.v0))
                else:
                    v0 = VelocityXY(1.0, 2.0 * c.k / 3.0)
                cfg = RunConfig(RestitutionMode(e), c, args.S, args.Sv,
                                args.nmax if args.nmax is not None else DEFAULT_NMAX, trace=True)
                res = run_na(normalized(v0), cfg)
                try:
                    rate = f"{estimate_rate([t.xy for t in res.trace]):.6g}"
                except DomainError:
                    rate = "n/a"
                line += f"\t{res.steps}\t{res.stop.value}\t{rate}"
            print(line, file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Frictionless impacts of a rigid disk in a corner.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def thresholds(sp):
        sp.add_argument("--S", type=float, default=DEFAULT_S, help="zone threshold (default 2*2^-52)")
        sp.add_argument("--Sv", type=float, default=DEFAULT_SV, help="rest-norm threshold (default 1e-12)")
        sp.add_argument("--nmax", type=int, default=None, help="step cap (default 10^4; 10^6 for --mode ta)")

    r = sub.add_parser("run", help="resolve one impact")
    r.add_argument("--eps", type=float, default=1.0, help="restitution coefficient in [0, 1]")
    r.add_argument("--alpha", default="pi/4", help="wedge half-angle: pi/N or radians")
    r.add_argument("--v0", default="1,0", help="initial velocity 'x,y'")
    r.add_argument("--mode", choices=("ta", "na"), default="na")
    thresholds(r)
    r.add_argument("--repr", choices=("xy", "xieta", "angle"), default="xy")
    r.add_argument("--trace", action="store_true", help="print every step")
    r.add_argument("--normalize", dest="normalize", action="store_true", default=None,
                   help="rescale v0 to unit norm (default for na)")
    r.add_argument("--no-normalize", dest="normalize", action="store_false")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", help="run the experiment grid and emit a table")
    s.add_argument("--grid", help="JSON grid file (default: built-in 7x7x7 grid)")
    s.add_argument("--eps", type=float, help="keep only cases with this coefficient")
    s.add_argument("--alpha", help="keep only cases with this angle")
    s.add_argument("--format", choices=("csv", "md", "json"), default="csv")
    s.add_argument("--out", help="write to this file instead of stdout")
    thresholds(s)
    s.set_defaults(func=_cmd_sweep)

    g = sub.add_parser("golden", help="compare the default grid against golden tables")
    g.add_argument("--golden", help="golden CSV (default: shipped tables)")
    g.add_argument("--tol-v", type=float, default=5e-3)
    g.add_argument("--tol-norm", type=float, default=5e-3)
    g.add_argument("--tol-steps", type=float, default=0.02)
    g.add_argument("--report-json", help="also write per-row verdicts as JSON")
    thresholds(g)
    g.set_defaults(func=_cmd_golden)

    a = sub.add_parser("analyze", help="spectral radius of the two-step matrix")
    a.add_argument("--eps", required=True, help="comma-separated coefficients in (0, 1)")
    a.add_argument("--alpha", default="pi/4", help="comma-separated angles")
    a.add_argument("--with-run", action="store_true", help="fit the decay rate of an NA trace")
    a.add_argument("--v0", help="initial velocity for --with-run (default (1, 2k/3))")
    thresholds(a)
    a.set_defaults(func=_cmd_analyze)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    logging.basicConfig(level=logging.WARNING, format=f"{PROG}: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except _UsageError as exc:
        print(f"{PROG}: usage error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
