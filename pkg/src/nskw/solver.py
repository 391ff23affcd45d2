"""Semi-discrete right-hand side and explicit time stepping.

The momentum equation is assembled in conservation form: one outer
difference of the total flux ``-p + u_x/v**(alpha+1) + J`` where ``J`` is the
Korteweg bracket.  The two boundary nodes are pinned to their initial
(far-field) values by zeroing their tendencies.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import FieldState, Grid, d1, d2
from .model import ParamSet

__all__ = [
    "PositivityError",
    "NonFiniteError",
    "RhsBundle",
    "StepControl",
    "Rejection",
    "RunResult",
    "ForcingFields",
    "ManufacturedSolution",
    "korteweg_flux",
    "rhs",
    "stable_dt",
    "step_rk4",
    "run",
    "mms_forcing",
    "standard_manufactured",
    "heat_only_manufactured",
    "constant_manufactured",
    "MANUFACTURED",
]

log = logging.getLogger(__name__)

EPS_POS = 1e-8


class PositivityError(ValueError):
    """``v`` or ``theta`` is not strictly positive."""


class NonFiniteError(FloatingPointError):
    def __init__(self, field_name, node):
        super().__init__(f"non-finite {field_name} at node {node}")
        self.field_name = field_name
        self.node = node


def _require_positive(v, theta=None):
    if v.min() <= 0.0:
        raise PositivityError(f"v <= 0 at node {int(np.argmin(v))}")
    if theta is not None and theta.min() <= 0.0:
        raise PositivityError(f"theta <= 0 at node {int(np.argmin(theta))}")


def _require_finite(**arrays):
    for name, a in arrays.items():
        bad = ~np.isfinite(a)
        if bad.any():
            raise NonFiniteError(name, int(np.flatnonzero(bad)[0]))


@dataclass
class RhsBundle:
    dv_dt: np.ndarray
    du_dt: np.ndarray
    dtheta_dt: np.ndarray
    momentum_flux: np.ndarray
    heat_flux: np.ndarray

    def max_abs(self) -> float:
        return float(max(np.abs(self.dv_dt).max(), np.abs(self.du_dt).max(), np.abs(self.dtheta_dt).max()))


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.5
    dt_max: float = 0.05
    dt_min: float = 1e-12
    eps_pos: float = EPS_POS
    max_rejects: int = 20

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not 0.0 < self.dt_min <= self.dt_max:
            raise ValueError("need 0 < dt_min <= dt_max")
        if self.max_rejects < 0:
            raise ValueError("max_rejects must be nonnegative")


@dataclass
class Rejection:
    reason: str
    node: int | None = None
    stage: int | None = None

    def __bool__(self):
        return False


class ForcingFields:
    """Time-dependent source terms added to the three tendencies."""

    def __init__(self, fn: Callable[[float], tuple[np.ndarray, np.ndarray, np.ndarray]]):
        self._fn = fn

    def __call__(self, t: float):
        return self._fn(t)


def korteweg_flux(v, g: Grid, beta: float) -> np.ndarray:
    """Inner Korteweg bracket ``-v_xx/v**(beta+5) + (beta+5)/2 * v_x**2/v**(beta+6)``."""
    v = np.asarray(v, dtype=float)
    _require_positive(v)
    return _korteweg(v, d1(v, g), d2(v, g), beta)


def _korteweg(v, vx, vxx, beta):
    b5 = beta + 5.0
    w = v ** (-b5)
    return w * (-vxx + 0.5 * b5 * vx * vx / v)


def rhs(s: FieldState, g: Grid, p: ParamSet, forcing: ForcingFields | None = None) -> RhsBundle:
    v, u, theta = s.v, s.u, s.theta
    _require_positive(v, theta)
    vx = d1(v, g)
    ux = d1(u, g)
    thx = d1(theta, g)
    pres = p.R * theta / v
    visc_w = v ** (-(p.alpha + 1.0))
    visc = ux * visc_w
    flux = -pres + visc + _korteweg(v, vx, d2(v, g), p.beta)
    q = theta**p.lam * thx / v
    dv = ux.copy()
    du = d1(flux, g)
    dth = (-pres * ux + d1(q, g) + ux * visc) / p.c_v
    for a in (dv, du, dth):
        a[0] = a[-1] = 0.0
    if forcing is not None:
        fv, fu, fth = forcing(s.t)
        dv += fv
        du += fu
        dth += fth
    _require_finite(dv_dt=dv, du_dt=du, dtheta_dt=dth)
    return RhsBundle(dv, du, dth, flux, q)


def stable_dt(s: FieldState, g: Grid, p: ParamSet, c: StepControl) -> float:
    """Explicit step bound from viscous, heat, capillary and acoustic limits."""
    v, u, theta = s.v, s.u, s.theta
    dx2 = g.dx * g.dx
    viscous = dx2 * v ** (p.alpha + 1.0) / 4.0
    heat = dx2 * p.c_v * v / (4.0 * theta**p.lam)
    capillary = dx2 * v ** (0.5 * (p.beta + 5.0)) / 4.0
    acoustic = g.dx / (np.abs(u) + np.sqrt(p.gamma * p.R * theta / v))
    dt = c.cfl * min(viscous.min(), heat.min(), capillary.min(), acoustic.min())
    return float(min(max(dt, c.dt_min), c.dt_max))


def _guard(s: FieldState, eps: float, stage: int) -> Rejection | None:
    for name in ("v", "u", "theta"):
        a = getattr(s, name)
        bad = ~np.isfinite(a)
        if bad.any():
            return Rejection(f"non-finite {name}", int(np.flatnonzero(bad)[0]), stage)
    for name in ("v", "theta"):
        a = getattr(s, name)
        if a.min() <= eps:
            return Rejection(f"{name} below positivity floor", int(np.argmin(a)), stage)
    return None


def _axpy(s: FieldState, h: float, k: RhsBundle) -> FieldState:
    return FieldState(s.t + h, s.v + h * k.dv_dt, s.u + h * k.du_dt, s.theta + h * k.dtheta_dt, s.bounds)


def step_rk4(
    s: FieldState,
    dt: float,
    g: Grid,
    p: ParamSet,
    c: StepControl,
    forcing: ForcingFields | None = None,
) -> FieldState | Rejection:
    """One classical RK4 step; returns a :class:`Rejection` instead of raising
    when a stage leaves the positive cone or goes non-finite."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    try:
        k1 = rhs(s, g, p, forcing)
        s2 = _axpy(s, 0.5 * dt, k1)
        if (rej := _guard(s2, c.eps_pos, 2)) is not None:
            return rej
        k2 = rhs(s2, g, p, forcing)
        s3 = _axpy(s, 0.5 * dt, k2)
        if (rej := _guard(s3, c.eps_pos, 3)) is not None:
            return rej
        k3 = rhs(s3, g, p, forcing)
        s4 = _axpy(s, dt, k3)
        if (rej := _guard(s4, c.eps_pos, 4)) is not None:
            return rej
        k4 = rhs(s4, g, p, forcing)
    except NonFiniteError as exc:
        return Rejection(str(exc), exc.node)
    except (PositivityError, FloatingPointError) as exc:
        return Rejection(str(exc))
    w = dt / 6.0
    out = FieldState(
        s.t + dt,
        s.v + w * (k1.dv_dt + 2.0 * (k2.dv_dt + k3.dv_dt) + k4.dv_dt),
        s.u + w * (k1.du_dt + 2.0 * (k2.du_dt + k3.du_dt) + k4.du_dt),
        s.theta + w * (k1.dtheta_dt + 2.0 * (k2.dtheta_dt + k3.dtheta_dt) + k4.dtheta_dt),
        s.bounds,
    )
    if (rej := _guard(out, c.eps_pos, 5)) is not None:
        return rej
    return out


@dataclass
class RunResult:
    state: FieldState
    records: list = field(default_factory=list)
    n_steps: int = 0
    n_rejects: int = 0
    status: str = "completed"
    abort: dict | None = None
    snapshots: list = field(default_factory=list)

    @property
    def completed(self) -> bool:
        return self.status == "completed"


def run(
    s0: FieldState,
    t_end: float,
    g: Grid,
    p: ParamSet,
    c: StepControl | None = None,
    hooks: Sequence[Callable[[FieldState], object]] = (),
    *,
    record_every: float | None = None,
    forcing: ForcingFields | None = None,
    diagnostics: bool = True,
    snapshot_every: float | None = None,
) -> RunResult:
    """Advance ``s0`` to ``t_end``.

    Records are taken at ``t = 0``, at the first accepted step on or past
    each multiple of ``record_every`` and at the final time.  Step sizes never
    depend on the cadence, so the trajectory is cadence independent.  With
    ``diagnostics`` on, a :class:`~nskw.diagnostics.Recorder` is attached and
    its rows land in ``RunResult.records``; extra ``hooks`` are called with
    the state at the same instants.

    A positivity failure (``max_rejects`` consecutive halvings) ends the run
    with ``status="aborted"`` and the last good state.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    c = c or StepControl()
    result = RunResult(state=s0)
    recorder = None
    if diagnostics:
        from .diagnostics import Recorder

        recorder = Recorder(g, p)

    def emit(state):
        if recorder is not None:
            result.records.append(recorder(state))
        for h in hooks:
            h(state)

    emit(s0)
    next_rec = record_every if record_every else math.inf
    next_snap = 0.0 if snapshot_every else math.inf
    if snapshot_every:
        result.snapshots.append(s0.copy())
        next_snap = snapshot_every
    s = s0
    tiny = 1e-13 * max(1.0, t_end)
    while t_end - s.t > tiny:
        dt = min(stable_dt(s, g, p, c), t_end - s.t)
        consecutive = 0
        while True:
            new = step_rk4(s, dt, g, p, c, forcing)
            if not isinstance(new, Rejection):
                break
            result.n_rejects += 1
            consecutive += 1
            if consecutive > c.max_rejects:
                result.status = "aborted"
                result.abort = {
                    "t": s.t,
                    "reason": new.reason,
                    "node": new.node,
                    "stage": new.stage,
                    "dt": dt,
                    "consecutive_rejects": consecutive,
                }
                log.warning("run aborted at t=%.6g: %s", s.t, new.reason)
                result.state = s
                if recorder is not None and (not result.records or result.records[-1].t != s.t):
                    emit(s)
                return result
            dt *= 0.5
        if t_end - new.t <= tiny:
            new.t = float(t_end)
        s = new
        result.n_steps += 1
        done = t_end - s.t <= tiny
        if s.t >= next_rec or done:
            emit(s)
            while next_rec <= s.t:
                next_rec += record_every
        if s.t >= next_snap or (done and snapshot_every):
            result.snapshots.append(s.copy())
            while next_snap <= s.t:
                next_snap += snapshot_every
    result.state = s
    return result


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form ``(v, u, theta)(t, x)`` with the derivatives needed by the
    continuous right-hand side.

    ``fields(t, x)`` returns a dict with keys ``v, v_t, v_x, v_xx, v_xxx,
    u, u_t, u_x, u_xx, theta, theta_t, theta_x, theta_xx``.
    """

    name: str
    fields: Callable[[float, np.ndarray], dict]


def _mode_solution(L, av, au, ath, name):
    k = math.pi / L

    def fields(t, x):
        e = math.exp(-t)
        c = np.cos(k * x)
        sn = np.sin(k * x)
        return {
            "v": 1.0 + av * e * c,
            "v_t": -av * e * c,
            "v_x": -av * e * k * sn,
            "v_xx": -av * e * k * k * c,
            "v_xxx": av * e * k**3 * sn,
            "u": au * e * sn,
            "u_t": -au * e * sn,
            "u_x": au * e * k * c,
            "u_xx": -au * e * k * k * sn,
            "theta": 1.0 + ath * e * c,
            "theta_t": -ath * e * c,
            "theta_x": -ath * e * k * sn,
            "theta_xx": -ath * e * k * k * c,
        }

    return ManufacturedSolution(name, fields)


def standard_manufactured(L: float) -> ManufacturedSolution:
    """``v = 1 + 0.1 e^-t cos(pi x/L)``, ``u = 0.1 e^-t sin(pi x/L)``,
    ``theta = 1 + 0.05 e^-t cos(pi x/L)``."""
    return _mode_solution(L, 0.1, 0.1, 0.05, "standard")


def heat_only_manufactured(L: float) -> ManufacturedSolution:
    """Frozen ``v = 1``, ``u = 0``; only ``theta`` carries the decaying mode."""
    return _mode_solution(L, 0.0, 0.0, 0.05, "heat_only")


def constant_manufactured(L: float = 1.0) -> ManufacturedSolution:
    return _mode_solution(L, 0.0, 0.0, 0.0, "constant")


MANUFACTURED = {
    "standard": standard_manufactured,
    "heat_only": heat_only_manufactured,
    "constant": constant_manufactured,
}


def continuous_rhs(m: dict, p: ParamSet):
    """Exact right-hand side of the three equations on closed-form fields."""
    v, vx, vxx, vxxx = m["v"], m["v_x"], m["v_xx"], m["v_xxx"]
    u_x, u_xx = m["u_x"], m["u_xx"]
    th, thx, thxx = m["theta"], m["theta_x"], m["theta_xx"]
    a1 = p.alpha + 1.0
    b5 = p.beta + 5.0
    pres = p.R * th / v
    pres_x = p.R * (thx / v - th * vx / v**2)
    visc_x = u_xx / v**a1 - a1 * u_x * vx / v ** (a1 + 1.0)
    # d/dx [ -v_xx v^-b5 + (b5/2) v_x^2 v^-(b5+1) ]
    kort_x = (
        -vxxx / v**b5
        + b5 * vxx * vx / v ** (b5 + 1.0)
        + b5 * vx * vxx / v ** (b5 + 1.0)
        - 0.5 * b5 * (b5 + 1.0) * vx**3 / v ** (b5 + 2.0)
    )
    heat_x = (
        p.lam * th ** (p.lam - 1.0) * thx * thx / v
        + th**p.lam * thxx / v
        - th**p.lam * thx * vx / v**2
    )
    fv = u_x
    fu = -pres_x + visc_x + kort_x
    fth = (-pres * u_x + heat_x + u_x * u_x / v**a1) / p.c_v
    return fv, fu, fth


def mms_forcing(manufactured: ManufacturedSolution, g: Grid, p: ParamSet) -> ForcingFields:
    """Source terms that make ``manufactured`` an exact solution.

    Interior nodes get ``d/dt(exact) - continuous_rhs(exact)``.  The discrete
    tendency at the pinned boundary nodes is zero, so there the forcing is the
    exact time derivative and the boundary values follow the manufactured
    solution.
    """
    x = np.asarray(g.x)
    m0 = manufactured.fields(0.0, x)
    if m0["v"].min() <= 0 or m0["theta"].min() <= 0:
        raise PositivityError(f"manufactured solution {manufactured.name!r} is not positive")

    def fn(t):
        m = manufactured.fields(t, x)
        if m["v"].min() <= 0 or m["theta"].min() <= 0:
            raise PositivityError(f"manufactured solution leaves the positive cone at t={t}")
        rv, ru, rth = continuous_rhs(m, p)
        fv = m["v_t"] - rv
        fu = m["u_t"] - ru
        fth = m["theta_t"] - rth
        for f, key in ((fv, "v_t"), (fu, "u_t"), (fth, "theta_t")):
            f[0] = m[key][0]
            f[-1] = m[key][-1]
        return fv, fu, fth

    return ForcingFields(fn)


def manufactured_state(manufactured: ManufacturedSolution, g: Grid, t: float = 0.0) -> FieldState:
    m = manufactured.fields(t, np.asarray(g.x))
    return FieldState(t, m["v"].copy(), m["u"].copy(), m["theta"].copy())
