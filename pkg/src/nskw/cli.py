"""Command-line front end.

Exit codes: 0 ok, 2 usage or schema error, 3 uncovered regime, 4 failed
verdict, 5 aborted run.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from .diagnostics import DIAG_COLUMNS, read_diagnostics_csv
from .experiments import refinement_study, run_scenario, sweep, write_sweep_csv
from .model import classify_thm11, classify_thm12, f_func, g_func
from .scenario import ConfigError, resolve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNCOVERED = 3
EXIT_FAILED = 4
EXIT_ABORTED = 5

log = logging.getLogger("nskw")


def _float(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}")
    if not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return val


def _fmt_num(x: float) -> str:
    return f"{x:.6g}" if abs(x) > 1e-14 else "0"


def cmd_classify(args) -> int:
    a, b, lam, gamma = args.alpha, args.beta, args.lam, args.gamma
    v11 = classify_thm11(a, b, lam)
    v12 = classify_thm12(a, b)
    parts = []
    if v11.covered:
        note = "" if v11.lambda_ok else " (needs lambda>=1; not covered)"
        parts.append(f"Thm1.1 case ({v11.case_label}){note}")
    if v12.covered:
        parts.append(f"Thm1.2 case ({v12.case_label})")
    covered = (v11.covered and v11.lambda_ok) or v12.covered
    if not parts or not covered:
        parts.append("no covered regime")
    parts.append(f"g={_fmt_num(g_func(a, b))}")
    if -5.0 <= b <= -2.0:
        parts.append(f"f(beta)={_fmt_num(f_func(b))}")
    print("; ".join(parts))
    if v12.covered:
        print(f"note: Thm1.2 also needs gamma-1 small (gamma-1={gamma - 1.0:.6g})")
    return EXIT_OK if covered else EXIT_UNCOVERED


def _load(args):
    sc = resolve(args.config)
    if args.set:
        sc = sc.with_overrides(args.set)
    return sc


def cmd_run(args) -> int:
    sc = _load(args)
    out = Path(args.out)
    outcome = run_scenario(sc, out)
    for v in outcome.verdicts:
        print(v.line())
    print(f"artifacts: {out}")
    if outcome.aborted:
        print(f"aborted: {outcome.abort.get('reason')}", file=sys.stderr)
        return EXIT_ABORTED
    return EXIT_OK if outcome.passed else EXIT_FAILED


def _parse_axis(text):
    if "=" not in text:
        raise ConfigError(f"axis {text!r} must look like key=v1,v2,...")
    key, vals = text.split("=", 1)
    try:
        values = [json.loads(v) for v in vals.split(",") if v.strip()]
    except json.JSONDecodeError as exc:
        raise ConfigError(f"axis {key!r}: {exc.msg}") from exc
    return key.strip(), values


def cmd_sweep(args) -> int:
    sc = _load(args)
    axes = dict(_parse_axis(a) for a in args.axis)
    if not axes:
        raise ConfigError("sweep needs at least one --axis")
    workers = args.workers
    if workers is None and os.environ.get("NSKW_THREADS"):
        workers = int(os.environ["NSKW_THREADS"])
    rows = sweep(sc, axes, paired=args.paired, workers=workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(out / "sweep.csv", rows)
    for r in rows:
        print(
            f"alpha={r['alpha']:g} beta={r['beta']:g} lambda={r['lambda']:g} gamma={r['gamma']:g} "
            f"regime={r['regime']} completed={r['completed']}"
        )
    print(f"table: {out / 'sweep.csv'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    sc = _load(args)
    resolutions = [int(n) for n in args.resolutions.split(",")]
    study = refinement_study(sc, resolutions)
    order = sc.checks.get("order", {})
    target, tol = order.get("target", 2.0), order.get("tol", 0.2)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "refinement.json").write_text(json.dumps(study, indent=2))
    ok = True
    for f, order in study["orders"].items():
        errs = ", ".join(f"{e:.3e}" for e in study["errors"][f])
        if math.isnan(order):
            passed = max(study["errors"][f]) == 0.0
        else:
            passed = abs(order - target) <= tol
        ok &= passed
        print(f"[{'PASS' if passed else 'FAIL'}] {f}: order={order:.3f} errors=[{errs}]")
    return EXIT_OK if ok else EXIT_FAILED


_PANELS = {
    "energy": (
        "Energy ledger",
        "linear",
        [("E_entropy", "E_entropy"), ("E_capillary", "E_capillary"), ("D_cum", "D_cum")],
    ),
    "bounds": (
        "Bounds vs floors",
        "linear",
        [("v_min", "v_min"), ("v_max", "v_max"), ("theta_min", "theta_min"), ("theta_floor", "theta_floor")],
    ),
    "decay": ("Decay metric", "log", [("decay_sup", "decay_sup")]),
}


def _gnuplot_script(csv_rel, title, scale, series, header, t_range):
    col = {name: header.index(name) + 1 for name in header}
    lines = [
        f"# {title}; generated from {csv_rel}",
        "set datafile separator ','",
        f"set title '{title}'",
        "set xlabel 't'",
        "set key outside",
    ]
    if scale == "log":
        lines.append("set logscale y")
    if t_range is None:
        lines.append("# empty diagnostics table: no data range")
        lines.append("set xrange [*:*]")
    else:
        lines.append(f"set xrange [{t_range[0]:.17g}:{t_range[1]:.17g}]")
    plots = [
        f"'{csv_rel}' every ::1 using {col['t']}:{col[name]} with lines title '{label}'"
        for name, label in series
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def cmd_plot(args) -> int:
    path = Path(args.csv)
    try:
        data = read_diagnostics_csv(path)
    except KeyError as exc:
        print(f"error: diagnostics CSV is missing column {exc.args[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = list(data)
    t = data["t"]
    t_range = None
    if len(t) == 0:
        print("warning: diagnostics CSV has no rows; scripts carry empty ranges", file=sys.stderr)
    else:
        t_range = (float(t.min()), float(t.max()))
    rel = os.path.relpath(path.resolve(), out.resolve())
    for name, (title, scale, series) in _PANELS.items():
        (out / f"{name}.gp").write_text(_gnuplot_script(rel, title, scale, series, header, t_range))
        print(out / f"{name}.gp")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nskw", description="Navier-Stokes-Korteweg simulation laboratory")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="report which regime covers (alpha, beta, lambda)")
    c.add_argument("--alpha", type=_float, required=True)
    c.add_argument("--beta", type=_float, required=True)
    c.add_argument("--lambda", dest="lam", type=_float, required=True)
    c.add_argument("--gamma", type=_float, default=1.4)
    c.set_defaults(func=cmd_classify)

    def scenario_args(p):
        p.add_argument("config", help="scenario JSON file or bundled preset name")
        p.add_argument("-o", "--out", default="out", help="output directory (created if absent)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="dotted-key override")

    r = sub.add_parser("run", help="run a scenario and evaluate its checks")
    scenario_args(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="parameter sweep over a base scenario")
    scenario_args(s)
    s.add_argument("--axis", action="append", default=[], metavar="KEY=V1,V2,...")
    s.add_argument("--paired", action="store_true", help="zip axes instead of taking their product")
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="manufactured-solution refinement study")
    scenario_args(v)
    v.add_argument("--resolutions", default="128,256,512")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="emit gnuplot scripts for a diagnostics CSV")
    p.add_argument("csv")
    p.add_argument("-o", "--out", default="plots")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
