"""Functionals of the energy/estimate machinery evaluated on grid states."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .grid import FieldState, Grid, d1, d2, integrate
from .model import ParamSet, entropy_density, kanel_psi

__all__ = [
    "DiagnosticsRecord",
    "DIAG_COLUMNS",
    "energy_ledger",
    "balance_residual",
    "theta_floor",
    "kanel_check",
    "sobolev_norms",
    "decay_metric",
    "Recorder",
    "write_diagnostics_csv",
    "read_diagnostics_csv",
    "TOL_QUAD",
    "TOL_FLOOR",
]

TOL_QUAD = 1e-6
TOL_FLOOR = 1e-3


@dataclass
class DiagnosticsRecord:
    t: float
    E_entropy: float
    E_capillary: float
    D_cum: float
    balance_residual: float
    v_min: float
    v_max: float
    theta_min: float
    theta_max: float
    theta_floor: float
    psi_max: float
    psi_rhs: float
    h1_v: float
    h1_u: float
    h1_theta: float
    h2_v: float
    decay_sup: float
    mass_drift: float
    # not serialized: needed to accumulate D_cum between records
    D_rate: float = 0.0

    @property
    def energy(self) -> float:
        return self.E_entropy + self.E_capillary


DIAG_COLUMNS = [f.name for f in fields(DiagnosticsRecord) if f.name != "D_rate"]


def _positive(s: FieldState):
    if s.v.min() <= 0 or s.theta.min() <= 0:
        raise ValueError("state is not positive")


def energy_ledger(s: FieldState, g: Grid, p: ParamSet) -> tuple[float, float, float]:
    """``(int eta dx, int v_x^2/(2 v^(beta+5)) dx, dissipation rate)``."""
    _positive(s)
    v, u, th = s.v, s.u, s.theta
    vx = d1(v, g)
    ux = d1(u, g)
    thx = d1(th, g)
    e_ent = integrate(entropy_density(v, u, th, p), g)
    e_cap = integrate(0.5 * vx * vx * v ** (-(p.beta + 5.0)), g)
    rate = thx * thx * th ** (p.lam - 2.0) / v + ux * ux / (th * v ** (p.alpha + 1.0))
    return e_ent, e_cap, integrate(rate, g)


def balance_residual(traj: Sequence[DiagnosticsRecord], D_cum=None) -> float:
    """Worst relative defect of the energy identity along a trajectory."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    e0 = traj[0].energy
    scale = max(e0, 1e-12)
    if D_cum is None:
        D_cum = [r.D_cum for r in traj]
    return float(max(abs(r.energy + d - e0) / scale for r, d in zip(traj, D_cum)))


def theta_floor(t: float, theta0_min: float, v_sup_alpha_m1: float, p: ParamSet) -> float:
    """Maximum-principle lower bound on the temperature at time ``t``.

    ``v_sup_alpha_m1`` is the running max of ``max_x v**(alpha-1)`` up to ``t``.
    """
    if t < 0 or not theta0_min > 0 or not v_sup_alpha_m1 > 0:
        raise ValueError("theta_floor needs t >= 0 and positive theta0_min, v_sup_alpha_m1")
    return 1.0 / (1.0 / theta0_min + p.R**2 * t / (4.0 * p.c_v) * v_sup_alpha_m1)


def _l2(f, g):
    return math.sqrt(max(integrate(f * f, g), 0.0))


def kanel_check(s: FieldState, g: Grid, p: ParamSet, tol: float = TOL_QUAD):
    """Pointwise Kanel bound ``max|Psi(v)| <= ||sqrt(phi(v))|| ||v_x / v^((beta+5)/2)||``.

    Psi is increasing with Psi(1) = 0, so the max over nodes sits at
    ``v_min`` or ``v_max``.
    """
    v = s.v
    if v.min() <= 0:
        raise ValueError("v is not positive")
    vx = d1(v, g)
    psi_max = max(abs(kanel_psi(float(v.max()), p.beta)), abs(kanel_psi(float(v.min()), p.beta)))
    root_phi = np.sqrt(np.maximum(v - np.log(v) - 1.0, 0.0))
    psi_rhs = _l2(root_phi, g) * _l2(vx * v ** (-0.5 * (p.beta + 5.0)), g)
    return psi_max, psi_rhs, bool(psi_max <= psi_rhs + tol)


def sobolev_norms(s: FieldState, g: Grid) -> tuple[float, float, float, float]:
    """Discrete H1 norms of ``v-1, u, theta-1`` and the H2 norm of ``v-1``."""
    dv = s.v - 1.0
    du = s.u
    dth = s.theta - 1.0
    out = []
    for f in (dv, du, dth):
        out.append(math.sqrt(integrate(f * f, g) + integrate(d1(f, g) ** 2, g)))
    h2 = math.sqrt(out[0] ** 2 + integrate(d2(dv, g) ** 2, g))
    return out[0], out[1], out[2], h2


def decay_metric(s: FieldState) -> float:
    """``max_x |(v-1, u, theta-1)|`` (Euclidean norm per node)."""
    return float(np.sqrt((s.v - 1.0) ** 2 + s.u**2 + (s.theta - 1.0) ** 2).max())


class Recorder:
    """Stateful hook turning a sequence of states into DiagnosticsRecords.

    Keeps the initial energy, the running ``max v**(alpha-1)``, the initial
    temperature minimum and the trapezoid-in-time dissipation sum.
    """

    def __init__(self, g: Grid, p: ParamSet):
        self.g = g
        self.p = p
        self.records: list[DiagnosticsRecord] = []
        self._e0 = None
        self._mass0 = None
        self._theta0_min = None
        self._vsup = 0.0

    def __call__(self, s: FieldState) -> DiagnosticsRecord:
        g, p = self.g, self.p
        e_ent, e_cap, rate = energy_ledger(s, g, p)
        mass = integrate(s.v - 1.0, g)
        self._vsup = max(self._vsup, float((s.v ** (p.alpha - 1.0)).max()))
        if self._e0 is None:
            self._e0 = e_ent + e_cap
            self._mass0 = mass
            self._theta0_min = float(s.theta.min())
            d_cum = 0.0
        else:
            prev = self.records[-1]
            d_cum = prev.D_cum + 0.5 * (s.t - prev.t) * (prev.D_rate + rate)
        psi_max, psi_rhs, _ = kanel_check(s, g, p)
        h1v, h1u, h1th, h2v = sobolev_norms(s, g)
        rec = DiagnosticsRecord(
            t=float(s.t),
            E_entropy=e_ent,
            E_capillary=e_cap,
            D_cum=d_cum,
            balance_residual=abs(e_ent + e_cap + d_cum - self._e0) / max(self._e0, 1e-12),
            v_min=float(s.v.min()),
            v_max=float(s.v.max()),
            theta_min=float(s.theta.min()),
            theta_max=float(s.theta.max()),
            theta_floor=theta_floor(s.t, self._theta0_min, self._vsup, p),
            psi_max=psi_max,
            psi_rhs=psi_rhs,
            h1_v=h1v,
            h1_u=h1u,
            h1_theta=h1th,
            h2_v=h2v,
            decay_sup=decay_metric(s),
            mass_drift=mass - self._mass0,
            D_rate=rate,
        )
        self.records.append(rec)
        return rec


def write_diagnostics_csv(path, records: Sequence[DiagnosticsRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIAG_COLUMNS)
        for r in records:
            d = asdict(r)
            w.writerow([f"{float(d[c]):.17g}" for c in DIAG_COLUMNS])


def read_diagnostics_csv(path) -> dict[str, np.ndarray]:
    """Column arrays keyed by header name; raises ``KeyError`` naming the
    first schema column missing from the file."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise KeyError(DIAG_COLUMNS[0])
    header = rows[0]
    for col in DIAG_COLUMNS:
        if col not in header:
            raise KeyError(col)
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float).reshape(-1, len(header))
    return {name: data[:, j] for j, name in enumerate(header)}
