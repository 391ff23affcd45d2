"""Runnable scenarios with pass/fail verdicts, sweeps and refinement studies."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import write_diagnostics_csv
from .grid import d1, integrate, make_initial, write_snapshot
from .model import classify_thm11, classify_thm12, entropy_far_field, entropy_s
from .scenario import Scenario, apply_overrides
from .solver import MANUFACTURED, RunResult, manufactured_state, mms_forcing, run

__all__ = [
    "Verdict",
    "ScenarioOutcome",
    "run_scenario",
    "decay_verdict",
    "decay_experiment",
    "regime_label",
    "sweep",
    "write_sweep_csv",
    "SWEEP_COLUMNS",
    "refinement_study",
    "initial_norms",
]

log = logging.getLogger(__name__)

SWEEP_CAP = 256
SWEEP_COLUMNS = [
    "alpha",
    "beta",
    "lambda",
    "gamma",
    "regime",
    "completed",
    "v_min",
    "v_max",
    "theta_min",
    "theta_max",
    "decay_sup",
]


@dataclass
class Verdict:
    check: str
    passed: bool
    measured: float
    tolerance: float
    context: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.check}: measured={self.measured:.6g} tol={self.tolerance:.6g}"


@dataclass
class ScenarioOutcome:
    result: RunResult | None
    verdicts: list
    aborted: bool
    abort: dict | None = None

    @property
    def passed(self) -> bool:
        return not self.aborted and all(v.passed for v in self.verdicts)

    def __iter__(self):
        # allows ``result, verdicts = run_scenario(...)``
        return iter((self.result, self.verdicts))


def _worst(records, values, predicate_max=True):
    arr = np.asarray(values, dtype=float)
    j = int(np.argmax(arr) if predicate_max else np.argmin(arr))
    return float(arr[j]), float(records[j].t)


def _check_verdicts(sc: Scenario, res: RunResult) -> list[Verdict]:
    recs = res.records
    checks = sc.checks
    out = []
    if checks.get("positivity", False):
        vmin = min(r.v_min for r in recs)
        tmin = min(r.theta_min for r in recs)
        ok = res.completed and vmin > 0 and tmin > 0
        worst = min(vmin, tmin)
        out.append(
            Verdict(
                "positivity",
                ok,
                worst,
                0.0,
                {"v_min": vmin, "theta_min": tmin, "rejects": res.n_rejects, "status": res.status},
            )
        )
    if "balance_residual" in checks:
        tol = checks["balance_residual"]
        val, t = _worst(recs, [r.balance_residual for r in recs])
        out.append(Verdict("balance_residual", val <= tol, val, tol, {"t": t}))
    if "theta_floor" in checks:
        tol = checks["theta_floor"]
        gaps = [r.theta_floor - r.theta_min for r in recs]
        val, t = _worst(recs, gaps)
        out.append(Verdict("theta_floor", val <= tol, val, tol, {"t": t}))
    if "kanel" in checks:
        tol = checks["kanel"]
        gaps = [r.psi_max - r.psi_rhs for r in recs]
        val, t = _worst(recs, gaps)
        out.append(Verdict("kanel", val <= tol, val, tol, {"t": t}))
    if "mass_drift" in checks:
        tol = checks["mass_drift"]
        m0 = abs(integrate(_initial_state(sc).v - 1.0, sc.grid))
        rel = [abs(r.mass_drift) / (1.0 + m0) for r in recs]
        val, t = _worst(recs, rel)
        out.append(Verdict("mass_drift", val <= tol, val, tol, {"t": t}))
    if "decay" in checks:
        out.append(decay_verdict(res, sc))
    return out


def _initial_state(sc: Scenario):
    g = sc.grid
    if sc.manufactured:
        return manufactured_state(MANUFACTURED[sc.manufactured](g.L), g)
    ini = sc.initial
    return make_initial(
        ini["kind"],
        ini.get("amplitudes", {}),
        g,
        sc.params,
        width=ini.get("width", 1.0),
        seed=ini.get("seed"),
        modes=ini.get("modes", 4),
        bounds=ini.get("bounds"),
    )


def _execute(sc: Scenario) -> RunResult:
    g, p = sc.grid, sc.params
    s0 = _initial_state(sc)
    forcing = mms_forcing(MANUFACTURED[sc.manufactured](g.L), g, p) if sc.manufactured else None
    return run(
        s0,
        sc.t_end,
        g,
        p,
        sc.control,
        record_every=sc.record_every,
        forcing=forcing,
        snapshot_every=sc.snapshot_every,
    )


def run_scenario(sc: Scenario, out_dir=None) -> ScenarioOutcome:
    """Run a scenario, evaluate its enabled checks and optionally persist.

    An aborted run, or initial data that cannot be built, comes back as a
    failed ``positivity`` verdict with the abort context; nothing is raised.
    Artifacts in ``out_dir``: ``manifest.json``, ``diagnostics.csv``,
    ``verdicts.json``, ``snapshots/t*.csv`` and, on abort, ``abort_report.json``.
    """
    try:
        res = _execute(sc)
    except ValueError as exc:
        abort = {"t": 0.0, "reason": f"initial data rejected: {exc}"}
        verdicts = [Verdict("positivity", False, float("nan"), 0.0, abort)]
        outcome = ScenarioOutcome(None, verdicts, True, abort)
        if out_dir is not None:
            _persist(sc, outcome, Path(out_dir))
        return outcome
    verdicts = _check_verdicts(sc, res)
    if not res.completed:
        if not any(v.check == "positivity" for v in verdicts):
            verdicts.insert(0, Verdict("positivity", False, res.state.v.min(), 0.0, dict(res.abort)))
        else:
            for v in verdicts:
                if v.check == "positivity":
                    v.passed = False
                    v.context.update(res.abort)
    outcome = ScenarioOutcome(res, verdicts, not res.completed, res.abort)
    if out_dir is not None:
        _persist(sc, outcome, Path(out_dir))
    return outcome


def _persist(sc: Scenario, outcome: ScenarioOutcome, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    res = outcome.result
    g = sc.grid
    manifest = {
        "name": sc.name,
        "config": sc.config,
        "params": {**sc.params.to_dict(), "c_v": sc.params.c_v},
        "grid": {"L": g.L, "N": g.N, "dx": g.dx},
        "status": "aborted" if outcome.aborted else "completed",
        "n_steps": res.n_steps if res else 0,
        "n_rejects": res.n_rejects if res else 0,
        "t_final": res.state.t if res else 0.0,
        "snapshot_times": [s.t for s in (res.snapshots or [res.state])] if res else [],
        "abort": outcome.abort,
        "passed": outcome.passed,
        "verdicts": [asdict(v) for v in outcome.verdicts],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=float))
    (out / "verdicts.json").write_text(
        json.dumps([asdict(v) for v in outcome.verdicts], indent=2, default=float)
    )
    write_diagnostics_csv(out / "diagnostics.csv", res.records if res else [])
    if res is not None:
        snaps = out / "snapshots"
        snaps.mkdir(exist_ok=True)
        states = res.snapshots or [res.state]
        for k, s in enumerate(states):
            write_snapshot(snaps / f"t{k:04d}.csv", s, g)
    if outcome.aborted:
        report = {"name": sc.name, "abort": outcome.abort}
        if res is not None:
            report["last_good_t"] = res.state.t
            report["last_good_v_min"] = float(res.state.v.min())
            report["last_good_theta_min"] = float(res.state.theta.min())
        (out / "abort_report.json").write_text(json.dumps(report, indent=2, default=float))


def decay_verdict(res: RunResult, sc: Scenario) -> Verdict:
    """Tail envelope of ``decay_sup`` against ``factor`` times its initial
    value, combined with the temperature window ``[theta_lo/2, 2 theta_hi]``.

    The envelope is the max of ``decay_sup`` over records in the last
    ``tail_fraction`` of ``[0, t_end]``.
    """
    opts = sc.checks.get("decay", {})
    factor = opts.get("factor", 0.1)
    tail = opts.get("tail_fraction", 0.1)
    recs = res.records
    d0 = recs[0].decay_sup
    t_cut = (1.0 - tail) * sc.t_end
    tail_vals = [r.decay_sup for r in recs if r.t >= t_cut] or [recs[-1].decay_sup]
    envelope = max(tail_vals)
    box = res.state.bounds
    if box is None:
        lo, hi = 0.5 * recs[0].theta_min, 2.0 * recs[0].theta_max
    else:
        lo, hi = 0.5 * box.theta_lo, 2.0 * box.theta_hi
    th_min = min(r.theta_min for r in recs)
    th_max = max(r.theta_max for r in recs)
    window_ok = th_min >= lo and th_max <= hi
    decayed = envelope <= factor * d0
    return Verdict(
        "decay",
        bool(res.completed and decayed and window_ok),
        envelope,
        factor * d0,
        {
            "initial": d0,
            "ratio": envelope / d0 if d0 > 0 else 0.0,
            "theta_window": [lo, hi],
            "theta_range": [th_min, th_max],
            "window_ok": window_ok,
            "t_end": sc.t_end,
        },
    )


def initial_norms(sc: Scenario) -> dict:
    """Entropy-based size of the initial data for covered-regime reports."""
    g, p = sc.grid, sc.params
    s0 = _initial_state(sc)
    ds = entropy_s(s0.v, s0.theta, p) - entropy_far_field(p)

    def h1(f):
        return math.sqrt(integrate(f * f, g) + integrate(d1(f, g) ** 2, g))

    return {
        "h1_v": h1(s0.v - 1.0),
        "h1_u": h1(s0.u),
        "h1_s": h1(ds),
        "h1_theta_scaled": h1((s0.theta - 1.0) / math.sqrt(p.gamma - 1.0)),
    }


def decay_experiment(sc: Scenario, out_dir=None, smallness: float | None = None, *, with_outcome: bool = False):
    """Long-time run in a covered regime of the second theorem; see
    :func:`decay_verdict` for the pass rule.

    Returns the decay Verdict, or ``(verdict, outcome)`` with ``with_outcome``.
    """
    p = sc.params
    reg = classify_thm12(p.alpha, p.beta)
    if not reg.covered:
        raise ValueError(f"(alpha, beta) = ({p.alpha}, {p.beta}) is outside cases (a)/(b)")
    limit = smallness if smallness is not None else sc.checks.get("decay", {}).get("smallness", 0.05)
    if p.gamma - 1.0 > limit:
        raise ValueError(f"gamma - 1 = {p.gamma - 1.0:.3g} exceeds the smallness limit {limit}")
    if "decay" not in sc.checks:
        sc = sc.with_overrides({"checks.decay": {}})
    outcome = run_scenario(sc, out_dir)
    v = next((x for x in outcome.verdicts if x.check == "decay"), None)
    if v is None:
        abort = outcome.abort or {}
        v = Verdict("decay", False, float("nan"), float("nan"), {"aborted": True, **abort})
    else:
        v.context["case"] = reg.case_label
        v.context["initial_norms"] = initial_norms(sc)
    return (v, outcome) if with_outcome else v


def regime_label(alpha: float, beta: float, lam: float) -> str:
    """``"11-iv"``, ``"12-b"``, ``"11-iv/12-b"`` or ``"none"``; a first-theorem
    case with ``lambda < 1`` is suffixed ``"*"``."""
    a = classify_thm11(alpha, beta, lam)
    b = classify_thm12(alpha, beta)
    parts = []
    if a.covered:
        parts.append(f"11-{a.case_label}" + ("" if a.lambda_ok else "*"))
    if b.covered:
        parts.append(f"12-{b.case_label}")
    return "/".join(parts) or "none"


_AXIS_ALIASES = {"alpha": "params.alpha", "beta": "params.beta", "lambda": "params.lambda", "gamma": "params.gamma"}


def _sweep_point(cfg: dict) -> dict:
    sc = Scenario.from_dict(cfg)
    p = sc.params
    row = {
        "alpha": p.alpha,
        "beta": p.beta,
        "lambda": p.lam,
        "gamma": p.gamma,
        "regime": regime_label(p.alpha, p.beta, p.lam),
        "completed": False,
        "v_min": math.nan,
        "v_max": math.nan,
        "theta_min": math.nan,
        "theta_max": math.nan,
        "decay_sup": math.nan,
    }
    try:
        outcome = run_scenario(sc)
    except Exception as exc:  # per-row failure must not stop the sweep
        log.warning("sweep point %s failed: %s", cfg.get("name"), exc)
        return row
    res = outcome.result
    if res is not None and res.records:
        recs = res.records
        row.update(
            completed=bool(res.completed),
            v_min=min(r.v_min for r in recs),
            v_max=max(r.v_max for r in recs),
            theta_min=min(r.theta_min for r in recs),
            theta_max=max(r.theta_max for r in recs),
            decay_sup=recs[-1].decay_sup,
        )
    return row


def _workers(requested):
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("NSKW_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(base: Scenario, axes, *, paired: bool = False, cap: int = SWEEP_CAP, workers=None) -> list[dict]:
    """Run ``base`` over the cartesian product of ``axes``.

    ``axes`` maps dotted config keys (or the bare names alpha, beta, lambda,
    gamma) to value lists.  With ``paired=True`` the lists are zipped instead.
    Rows come back in lexicographic parameter order whatever the worker count.
    """
    keys = [_AXIS_ALIASES.get(k, k) for k in axes]
    values = [list(v) for v in axes.values()]
    if paired:
        if len({len(v) for v in values}) > 1:
            raise ValueError("paired sweep axes must have equal lengths")
        points = list(zip(*values))
    else:
        points = list(itertools.product(*values))
    if len(points) > cap:
        raise ValueError(f"sweep of {len(points)} points exceeds the cap of {cap}")
    cfgs = []
    for pt in points:
        cfg = apply_overrides(base.config, list(zip(keys, pt)))
        cfg["name"] = f"{base.name}[" + ",".join(f"{k}={v}" for k, v in zip(keys, pt)) + "]"
        cfgs.append(cfg)
    n = min(_workers(workers), len(cfgs)) or 1
    if n == 1:
        rows = [_sweep_point(c) for c in cfgs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(_sweep_point, cfgs))
    rows.sort(key=lambda r: (r["alpha"], r["beta"], r["lambda"], r["gamma"]))
    return rows


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_sweep_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in SWEEP_COLUMNS])


def _fit_order(dx, err):
    err = np.asarray(err, dtype=float)
    if np.any(err <= 0):
        return math.nan
    slope, _ = np.polyfit(np.log(dx), np.log(err), 1)
    return float(slope)


def refinement_study(sc: Scenario, resolutions) -> dict:
    """Max-norm errors against the scenario's manufactured solution and
    least-squares convergence orders per field."""
    res_list = [int(n) for n in resolutions]
    if len(res_list) < 3:
        raise ValueError("need at least three resolutions")
    if any(b != 2 * a for a, b in zip(res_list, res_list[1:])):
        raise ValueError(f"resolutions must double at each step, got {res_list}")
    name = sc.manufactured or "standard"
    errors = {"v": [], "u": [], "theta": []}
    dxs = []
    for n in res_list:
        cfg = apply_overrides(sc.config, [("grid.N", n), ("manufactured", name)])
        run_sc = Scenario.from_dict(cfg)
        g = run_sc.grid
        res = _execute(run_sc)
        if not res.completed:
            raise RuntimeError(f"manufactured run at N={n} aborted: {res.abort}")
        exact = manufactured_state(MANUFACTURED[name](g.L), g, res.state.t)
        for f in errors:
            errors[f].append(float(np.abs(getattr(res.state, f) - getattr(exact, f)).max()))
        dxs.append(g.dx)
    orders = {f: _fit_order(dxs, e) for f, e in errors.items()}
    return {"manufactured": name, "N": res_list, "dx": dxs, "errors": errors, "orders": orders}
