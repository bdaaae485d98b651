"""Command-line entry point ``qlslab``.

Exit codes: 0 success, 2 configuration error, 3 solver divergence,
4 hypothesis rejected.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import checker as ck
from . import diagnostics as dg
from . import io as qio
from . import scattering as sc
from .checker import HypothesisError
from .solver import ConfigError, Problem

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_HYPOTHESIS = 0, 2, 3, 4

log = logging.getLogger("qlslab")


def _cmd_simulate(args) -> int:
    cfg = qio.load_config(args.config)
    res = qio.orchestrate(cfg, args.out)
    if res.exit_code:
        print(f"{res.status}: {res.message}", file=sys.stderr)
    else:
        print(f"wrote {res.outdir}")
    return res.exit_code


def _cmd_diagnose(args) -> int:
    cfg = qio.load_config(args.config)
    problem = Problem(cfg.model, cfg.grid)
    recs = []
    for path in sorted(args.checkpoints, key=lambda p: qio.read_checkpoint(p)[2]):
        grid, u, t = qio.read_checkpoint(path)
        if (grid.dim, grid.M, grid.L) != (cfg.grid.dim, cfg.grid.M, cfg.grid.L):
            raise ConfigError(f"{path}: grid does not match the configuration")
        recs.append(dg.record(problem, u, t))
    out = Path(args.out) if args.out else None
    if out:
        qio.write_records_csv(out, recs)
    else:
        print(",".join(qio.CSV_HEADER))
        for r in recs:
            print(",".join(repr(float(x)) for x in r.as_row()))
    return EXIT_OK


def _check_report(args):
    if args.theorem == "cor6.5":
        if None in (args.N, args.m, args.n, args.beta):
            raise ConfigError("cor6.5 needs --N, --m, --n and --beta")
        return ck.check_corollary65(args.N, args.m, args.n, args.beta)
    if args.params is None:
        raise ConfigError(f"theorem {args.theorem} needs --params")
    cfg = qio.load_config(args.params)
    c = cfg.check
    model = cfg.model
    if args.theorem == "1":
        if c["mass"] is None or c["energy"] is None:
            raise ConfigError("theorem 1 needs check.mass and check.energy")
        return ck.check_theorem1(model, c["mass"], c["energy"], cfg.diagnostics["sobolev_constant"])
    if args.theorem == "3":
        return ck.check_theorem3(model, c["normalization"])
    if args.theorem == "4":
        return ck.check_theorem4(model, c["p"], c["theta"], c["weight"], c["cr"], c["r"], c["q"])
    if args.theorem == "6":
        return ck.check_theorem6(model)
    return ck.check_theorem7(model)


def _cmd_check(args) -> int:
    rep = _check_report(args)
    print(rep.to_record() if args.json else rep.to_text())
    return EXIT_OK if rep.verdict == "applies" else EXIT_HYPOTHESIS


def _cmd_scatter(args) -> int:
    snaps = {}
    grid = None
    for path in args.checkpoints:
        g, u, t = qio.read_checkpoint(path)
        if grid is not None and (g.dim, g.M, g.L) != (grid.dim, grid.M, grid.L):
            raise ConfigError(f"{path}: grid differs from the other checkpoints")
        grid = g
        snaps[t] = u
    if len(snaps) < 2:
        raise ConfigError("scatter needs at least two checkpoints")
    series = sc.cauchy_gaps(grid, snaps)
    header = ("t_i", "t_j", "l2", "h1", "x", "sigma")
    if args.out:
        qio.write_rows(args.out, header, series.rows())
    else:
        print(",".join(header))
        for r in series.rows():
            print(",".join(repr(x) for x in r))
    print(f"# u_plus error bar (last gap, L2) = {series.error_bar!r}", file=sys.stderr)
    return EXIT_OK


def _cmd_fit_decay(args) -> int:
    cols = qio.read_csv(args.csv)
    if args.column not in cols:
        raise ConfigError(f"column {args.column!r} not in {args.csv}")
    fit = dg.decay_fit(cols["t"], cols[args.column], tuple(args.window) if args.window else None,
                       args.predicted)
    print(f"iota = {fit.iota:.6f} +/- {fit.stderr:.2e} on [{fit.t_lo:g}, {fit.t_hi:g}], n = {fit.n}")
    if fit.predicted is not None:
        print(f"predicted = {fit.predicted:g}")
    return EXIT_OK


def _cmd_export(args) -> int:
    cols = qio.read_csv(args.csv)
    for name in (args.x, args.column):
        if cols and name not in cols:
            raise ConfigError(f"column {name!r} not in {args.csv}")
    text = qio.export_plotdata(cols, args.x, args.column, args.mode,
                               tuple(args.window) if args.window else None)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qlslab", description="Quasilinear Schrodinger simulation and diagnostics.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a configured simulation")
    s.add_argument("config")
    s.add_argument("--out", help="output directory (default: run.output)")
    s.set_defaults(func=_cmd_simulate)

    s = sub.add_parser("diagnose", help="recompute diagnostics from checkpoint files")
    s.add_argument("config")
    s.add_argument("checkpoints", nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=_cmd_diagnose)

    s = sub.add_parser("check", help="evaluate the hypotheses of a theorem")
    s.add_argument("--theorem", required=True, choices=ck.THEOREMS)
    s.add_argument("--params", help="configuration with [model] and [check] sections")
    s.add_argument("--N", type=int)
    s.add_argument("--m", type=float)
    s.add_argument("--n", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--json", action="store_true", help="print the one-line JSON record")
    s.set_defaults(func=_cmd_check)

    s = sub.add_parser("scatter", help="Cauchy gaps of pullbacks from checkpoint files")
    s.add_argument("checkpoints", nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=_cmd_scatter)

    s = sub.add_parser("fit-decay", help="fit a power-law decay rate to a CSV column")
    s.add_argument("csv")
    s.add_argument("--column", default="phi")
    s.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"))
    s.add_argument("--predicted", type=float)
    s.set_defaults(func=_cmd_fit_decay)

    s = sub.add_parser("export-plot", help="write plot-ready data from a CSV column")
    s.add_argument("csv")
    s.add_argument("--column", default="phi")
    s.add_argument("--x", default="t")
    s.add_argument("--mode", choices=("loglog", "linear", "slope-fit"), default="loglog")
    s.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"))
    s.add_argument("--out")
    s.set_defaults(func=_cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(over="ignore", invalid="ignore")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisError as e:
        print(f"hypothesis rejected: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
