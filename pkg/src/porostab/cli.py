"""Command line front end.

Subcommands: ``baseflow``, ``critical``, ``squire-check``, ``evolve``, ``plot``.

Exit codes: 0 success, 2 usage error, 3 a checked property failed,
4 numerical failure.

``--config FILE`` reads flat ``key = value`` lines (arrays comma separated,
keys spelled like the long options); command-line flags override the file.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .baseflow import profile_table, write_profile_csv
from .energystab import (critical_point_energy_3d, critical_point_energy_spanwise,
                         default_a_range, energy_RE, verify_squire_energy)
from .errors import PorostabError, UsageError
from .evolve import EvolveConfig, energy_threshold, energy_trace
from .linstab import CriticalPoint, critical_point_linear, neutral_Re
from .plotting import render
from .records import ResultCache, ResultRecord, write_csv
from .spectral import build_grid

log = logging.getLogger("porostab")

KIND_ALIASES = {"linear": "linear", "energy": "energy-spanwise", "energy-spanwise": "energy-spanwise",
                "energy-3d": "energy-3d"}
DEFAULT_A_GRID = "0.5,1,1.5,2,2.5,3,3.5,4"
DEFAULT_B_GRID = "0,0.5,1,2"


def float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def float_pair(text):
    vals = float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return tuple(vals)


def read_config(path) -> dict:
    """Flat key = value file; section headers are optional and ignored."""
    text = Path(path).read_text()
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string("[__flat__]\n" + text)
    out = {}
    for section in cp.sections():
        for k, v in cp.items(section):
            out[k.replace("-", "_")] = v
    return out


def _outdir(args) -> Path:
    p = Path(args.outdir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _tag(x) -> str:
    return format(x, "g")


# --------------------------------------------------------------------------

def cmd_baseflow(args) -> int:
    grid = build_grid(args.N)
    table = profile_table(args.M, grid.z)
    path = write_profile_csv(table, _outdir(args) / f"baseflow_M{_tag(args.M)}_N{args.N}.csv")
    print(path)
    return 0


def _critical_one(kind, M, args):
    if kind == "linear":
        kw = {"a_range": args.a_range or (0.3, 4.0)}
        if args.n_scan:
            kw["n_scan"] = args.n_scan
        return critical_point_linear(M, N=args.N, **kw)
    if kind == "energy-spanwise":
        kw = {"a_range": args.a_range}
        if args.n_scan:
            kw["n_scan"] = args.n_scan
        return critical_point_energy_spanwise(M, N=args.N, **kw)
    a_grid = float_list(args.a_grid or "0.01,0.25,0.5,1,1.5,2,2.5,3")
    b_grid = float_list(args.b_grid or "0,0.5,1,1.5,2,2.5,3")
    return critical_point_energy_3d(M, a_grid, b_grid, N=args.N)


def cmd_critical(args) -> int:
    kind = KIND_ALIASES.get(args.kind)
    if kind is None:
        raise UsageError(f"unknown kind {args.kind!r}; expected one of {sorted(KIND_ALIASES)}")
    out = _outdir(args)
    cache = ResultCache(args.cache_dir)

    def config_for(M):
        return {"command": "critical", "kind": kind, "M": M, "N": args.N,
                "a_range": args.a_range, "n_scan": args.n_scan,
                "a_grid": args.a_grid, "b_grid": args.b_grid, "version": __version__}

    def work(M):
        cfg = config_for(M)
        if args.cache == "reuse":
            hit = cache.get(cfg)
            if hit is not None:
                log.info("cache hit for %s M=%g", kind, M)
                return hit
        cp = _critical_one(kind, M, args)
        rec = ResultRecord("critical-point", cfg, cp.to_dict(),
                           {"N": cp.N, "relative_change_N_plus_8": cp.convergence,
                            "converged": cp.converged})
        cache.put(rec)
        return rec

    if args.workers and args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(work, args.M))
    else:
        records = [work(M) for M in args.M]

    rows = []
    for rec in records:  # single writer
        cp = CriticalPoint.from_dict(rec.payload)
        rec.write(out / f"critical_{kind}_M{_tag(cp.M)}.json")
        rows.append((cp.kind, cp.M, cp.a_c, cp.b_c, cp.R_c, cp.N, cp.convergence, cp.converged))
        print(f"{cp.kind} M={cp.M:g}: R_c={cp.R_c:.10g} a_c={cp.a_c:.6g} N={cp.N} "
              f"converged={cp.converged}")
    csv_path = write_csv(out / f"critical_{kind}.csv",
                         ["kind", "M", "a_c", "b_c", "R_c", "N", "convergence", "converged"], rows)
    if args.neutral_curve and kind != "energy-3d":
        span = (0.3, 4.0) if kind == "linear" else (0.2, default_a_range(max(args.M))[1])
        a_vals = np.geomspace(*(args.a_range or span), args.neutral_points)
        nrows = []
        for M in args.M:
            for a in a_vals:
                R = neutral_Re(M, a, args.N) if kind == "linear" else energy_RE(M, a, args.N)
                nrows.append((M, a, R))
        npath = write_csv(out / f"neutral_{kind}.csv", ["M", "a", "Re_neutral"], nrows)
        if args.plot:
            render([npath], out / f"neutral_{kind}.svg", title=f"neutral curves ({kind})")
    if args.plot:
        render([csv_path], out / f"critical_{kind}.svg", title=f"{kind} threshold")
    return 0


def cmd_squire_check(args) -> int:
    out = _outdir(args)
    rep = verify_squire_energy(args.M, args.a_grid, args.b_grid, N=args.N, rtol=args.rtol,
                               workers=args.workers)
    tag = _tag(rep.M)
    write_csv(out / f"squire_M{tag}.csv", ["M", "a", "b", "m"], rep.rows())
    rec = ResultRecord("squire-report",
                       {"command": "squire-check", "M": args.M, "a_grid": args.a_grid,
                        "b_grid": args.b_grid, "N": args.N, "rtol": args.rtol},
                       {"M": rep.M, "status": rep.status, "best": list(rep.best),
                        "offending": [list(r) for r in rep.offending], "rtol": rep.rtol})
    rec.write(out / f"squire_M{tag}.json")
    if args.plot:
        render([out / f"squire_M{tag}.csv"], out / f"squire_M{tag}.svg", title=f"M = {tag}")
    a, b, m = rep.best
    print(f"squire-check M={rep.M:g}: {rep.status}; global max m={m:.10g} at a={a:g}, b={b:g}")
    for a, b, m in rep.offending:
        print(f"  b != 0 exceeds spanwise maximum: a={a:g} b={b:g} m={m:.10g}")
    return 0 if rep.passed else 3


def cmd_evolve(args) -> int:
    if args.T is not None and args.T <= 0:
        raise UsageError("T must be positive")
    R_E = energy_threshold(args.M)
    if args.R is None and args.R_ratio is None:
        raise UsageError("give --R or --R-ratio")
    R = args.R if args.R is not None else args.R_ratio * R_E
    a = args.a
    if a is None:
        a = critical_point_energy_spanwise(args.M).a_c
    cfg = EvolveConfig(M=args.M, R=R, a=a, N=args.N, dt=args.dt, T=args.T, ic=args.ic,
                       seed=args.seed, sample_every=args.sample_every)
    tr = energy_trace(cfg, R_E=R_E)
    out = _outdir(args)
    env = tr.envelope if tr.envelope is not None else [None] * len(tr.t)
    write_csv(out / "trace.csv", ["t", "E", "envelope"], zip(tr.t, tr.E, env))
    payload = {"R_E": R_E, "alpha": tr.bound.rate, "monotone": tr.monotone,
               "under_envelope": tr.under_envelope, "max_amplification": tr.max_amplification,
               "E_final": float(tr.E[-1]), "note": tr.note}
    config = {"command": "evolve", "M": cfg.M, "R": cfg.R, "a": cfg.a, "N": cfg.N, "dt": cfg.dt,
              "T": cfg.T, "ic": cfg.ic, "seed": cfg.seed, "sample_every": cfg.sample_every}
    ResultRecord("energy-trace", config, payload, {"dt": cfg.dt, "N": cfg.N}).write(out / "manifest.json")
    if args.plot:
        render([out / "trace.csv"], out / "trace.svg", title=f"M={cfg.M:g}, R={cfg.R:.4g}")
    print(f"evolve M={cfg.M:g} R={cfg.R:.6g} (R_E={R_E:.6g}): monotone={tr.monotone} "
          f"under_envelope={tr.under_envelope} max E/E0={tr.max_amplification:.6g}")
    return 0


def cmd_plot(args) -> int:
    path, ordering = render(args.inputs, args.output, title=args.title)
    print(path)
    if ordering is False:
        print("warning: energy threshold not below linear threshold at every M", file=sys.stderr)
        return 3
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="porostab",
                                     description="Stability thresholds of Brinkman channel flow")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--config", help="flat key = value file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, outdir=True):
        if outdir:
            p.add_argument("--outdir", default=".", help="output directory")
        p.add_argument("--plot", action="store_true", help="also render SVG figures")
        p.add_argument("--workers", type=int, default=1)
        return p

    p = sub.add_parser("baseflow", help="tabulate U, U', U'' on a Chebyshev grid")
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--N", type=int, default=33)
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_baseflow)

    p = common(sub.add_parser("critical", help="critical Reynolds numbers"))
    p.add_argument("--kind", default="linear", help="linear | energy | energy-3d")
    p.add_argument("--M", type=float_list, required=True, help="comma-separated M values")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--a-range", type=float_pair, default=None)
    p.add_argument("--n-scan", type=int, default=None)
    p.add_argument("--a-grid", default=None, help="energy-3d only")
    p.add_argument("--b-grid", default=None, help="energy-3d only")
    p.add_argument("--neutral-curve", action="store_true", help="also write M,a,Re_neutral rows")
    p.add_argument("--neutral-points", type=int, default=24)
    p.add_argument("--cache", choices=("reuse", "recompute"), default="reuse")
    p.add_argument("--cache-dir", default=None, help="overrides $POROSTAB_CACHE_DIR")
    p.set_defaults(func=cmd_critical)

    p = common(sub.add_parser("squire-check", help="3D energy maximum over an (a, b) grid"))
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--a-grid", type=float_list, default=DEFAULT_A_GRID)
    p.add_argument("--b-grid", type=float_list, default=DEFAULT_B_GRID)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--rtol", type=float, default=1e-6)
    p.set_defaults(func=cmd_squire_check)

    p = common(sub.add_parser("evolve", help="integrate a spanwise disturbance and test the decay bound"))
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--R-ratio", type=float, default=None, help="R as a multiple of R_E(M)")
    p.add_argument("--a", type=float, default=None, help="default: critical energy wavenumber")
    p.add_argument("--N", type=int, default=48)
    p.add_argument("--dt", type=float, default=EvolveConfig.dt)
    p.add_argument("--T", type=float, default=5.0)
    p.add_argument("--ic", choices=("optimal", "random"), default="optimal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-every", type=int, default=10)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("plot", help="render CSV output as SVG")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--title", default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            parser.error(f"unknown keys in {args.config}: {', '.join(unknown)}")
        # re-parse so explicit flags win over file values
        subparser.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse: 2 on bad usage, 0 for --help / --version
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PorostabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
