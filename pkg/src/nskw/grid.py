"""Uniform grid on a truncated line, field storage and difference operators."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .model import ParamSet

__all__ = [
    "Grid",
    "Bounds",
    "FieldState",
    "d1",
    "d2",
    "integrate",
    "make_initial",
    "write_snapshot",
    "read_snapshot",
    "FAR_FIELD",
    "INITIAL_KINDS",
]

FAR_FIELD = (1.0, 0.0, 1.0)
FAR_FIELD_TOL = 1e-6
MIN_INITIAL = 1e-3
INITIAL_KINDS = ("gaussian", "tanh_front", "fourier_mix")


@dataclass(frozen=True)
class Grid:
    """Nodes ``x_j = -L + j*dx``, ``j = 0..N``, on ``[-L, L]``."""

    L: float
    N: int
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"half length must be positive, got {self.L}")
        if int(self.N) != self.N or self.N < 16:
            raise ValueError(f"need an integer N >= 16, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "dx", 2.0 * self.L / self.N)
        x = -self.L + self.dx * np.arange(self.N + 1)
        x[-1] = self.L
        # exact mirror symmetry of the node set
        x = 0.5 * (x - x[::-1])
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def size(self) -> int:
        return self.N + 1


@dataclass(frozen=True)
class Bounds:
    """Declared box for the initial data, kept for later bound comparisons."""

    v_lo: float
    v_hi: float
    theta_lo: float
    theta_hi: float

    def as_dict(self):
        return {"v": [self.v_lo, self.v_hi], "theta": [self.theta_lo, self.theta_hi]}


@dataclass
class FieldState:
    t: float
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    bounds: Bounds | None = None

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if not (self.v.shape == self.u.shape == self.theta.shape) or self.v.ndim != 1:
            raise ValueError("v, u, theta must be 1-d arrays of equal length")

    def copy(self) -> "FieldState":
        return replace(self, v=self.v.copy(), u=self.u.copy(), theta=self.theta.copy())

    def reflected(self) -> "FieldState":
        """Mirror image under ``x -> -x`` (velocity changes sign)."""
        return replace(self, v=self.v[::-1].copy(), u=-self.u[::-1], theta=self.theta[::-1].copy())

    def is_positive(self, floor: float = 0.0) -> bool:
        return bool(self.v.min() > floor and self.theta.min() > floor)

    @classmethod
    def constant(cls, g: Grid, t: float = 0.0) -> "FieldState":
        n = g.size
        return cls(t, np.ones(n), np.zeros(n), np.ones(n), Bounds(1.0, 1.0, 1.0, 1.0))


def _check(f, g):
    f = np.asarray(f, dtype=float)
    if f.shape != (g.size,):
        raise ValueError(f"expected an array of length {g.size}, got shape {f.shape}")
    return f


def d1(f, g: Grid) -> np.ndarray:
    """First derivative: central inside, second-order one-sided at the ends."""
    f = _check(f, g)
    out = np.empty_like(f)
    inv = 1.0 / (2.0 * g.dx)
    out[1:-1] = (f[2:] - f[:-2]) * inv
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) * inv
    return out


def d2(f, g: Grid) -> np.ndarray:
    """Second derivative: 3-point inside, 4-point one-sided at the ends."""
    f = _check(f, g)
    out = np.empty_like(f)
    inv = 1.0 / (g.dx * g.dx)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) * inv
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) * inv
    return out


def integrate(f, g: Grid) -> float:
    """Composite trapezoid over ``[-L, L]``."""
    f = _check(f, g)
    w = f.copy()
    w[0] *= 0.5
    w[-1] *= 0.5
    # fold mirror nodes first so odd integrands cancel exactly
    m = g.size // 2
    total = (w[:m] + w[::-1][:m]).sum()
    if g.size % 2:
        total += w[m]
    return float(g.dx * total)


def _window(x, L):
    """Smooth bump equal to 1 near the centre and flat zero at ``|x| >= 0.8 L``."""
    edge = 0.8 * L
    s = np.clip(np.abs(x) / edge, 0.0, 1.0)
    out = np.zeros_like(x)
    inside = s < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def _profile(kind: str, x: np.ndarray, L: float, amp: float, width: float, seed, modes, salt):
    if amp == 0.0:
        return np.zeros_like(x)
    if kind == "gaussian":
        return amp * np.exp(-((x / width) ** 2))
    if kind == "tanh_front":
        # plateau of half-width 2*width with tanh shoulders
        c = 2.0 * width
        return 0.5 * amp * (np.tanh((x + c) / width) - np.tanh((x - c) / width))
    if kind == "fourier_mix":
        rng = np.random.default_rng(None if seed is None else [int(seed), salt])
        coeffs = rng.uniform(-1.0, 1.0, size=modes)
        phases = rng.uniform(0.0, 2.0 * math.pi, size=modes)
        k = np.pi * np.arange(1, modes + 1) / width
        wave = (coeffs[:, None] * np.sin(k[:, None] * x[None, :] + phases[:, None])).sum(axis=0)
        wave /= max(np.abs(coeffs).sum(), 1e-300)
        return amp * wave * _window(x, L)
    raise ValueError(f"unknown initial kind {kind!r}; expected one of {INITIAL_KINDS}")


def make_initial(
    kind: str,
    amp: dict,
    g: Grid,
    p: ParamSet | None = None,
    *,
    width: float = 1.0,
    seed: int | None = None,
    modes: int = 4,
    bounds: dict | Bounds | None = None,
) -> FieldState:
    """Perturbation of the far-field state ``(1, 0, 1)`` at ``t = 0``.

    Parameters
    ----------
    kind : {"gaussian", "tanh_front", "fourier_mix"}
        Profile shape, applied to each field with its own amplitude.
    amp : dict
        Amplitudes keyed by ``"v"``, ``"u"``, ``"theta"``; missing keys are 0.
    g : Grid
    p : ParamSet, optional
        Unused by the profiles, accepted so callers can pass a full context.
    width : float
        Length scale (gaussian width, tanh shoulder, base wavelength/2).
    seed : int, optional
        Seed of the ``fourier_mix`` coefficients.
    bounds : dict or Bounds, optional
        Declared ``{"v": [lo, hi], "theta": [lo, hi]}``; the data must lie
        inside.  When absent the box is the data's own range.

    Returns
    -------
    FieldState
        Boundary nodes carry exactly the far-field values.
    """
    unknown = set(amp) - {"v", "u", "theta"}
    if unknown:
        raise ValueError(f"unknown amplitude keys {sorted(unknown)}")
    x = g.x
    fields = []
    for salt, (name, base) in enumerate(zip(("v", "u", "theta"), FAR_FIELD)):
        pert = _profile(kind, x, g.L, float(amp.get(name, 0.0)), width, seed, modes, salt)
        edge = max(abs(pert[0]), abs(pert[-1]))
        if edge >= FAR_FIELD_TOL:
            raise ValueError(
                f"{name} perturbation is {edge:.3g} at x=+-L; enlarge L to reach the far field"
            )
        f = base + pert
        f[0] = f[-1] = base
        fields.append(f)
    v, u, theta = fields
    for name, f in (("v", v), ("theta", theta)):
        if f.min() < MIN_INITIAL:
            raise ValueError(f"initial {name} drops to {f.min():.3g} < {MIN_INITIAL}")
    if bounds is None:
        box = Bounds(float(v.min()), float(v.max()), float(theta.min()), float(theta.max()))
    elif isinstance(bounds, Bounds):
        box = bounds
    else:
        box = Bounds(*map(float, bounds["v"]), *map(float, bounds["theta"]))
    if not (box.v_lo > 0 and box.theta_lo > 0):
        raise ValueError("declared bounds must be positive")
    if v.min() < box.v_lo or v.max() > box.v_hi:
        raise ValueError(f"v0 range [{v.min():.6g}, {v.max():.6g}] leaves declared {box.v_lo, box.v_hi}")
    if theta.min() < box.theta_lo or theta.max() > box.theta_hi:
        raise ValueError(
            f"theta0 range [{theta.min():.6g}, {theta.max():.6g}] leaves declared "
            f"{box.theta_lo, box.theta_hi}"
        )
    return FieldState(0.0, v, u, theta, box)


def write_snapshot(path, s: FieldState, g: Grid) -> None:
    """CSV with header ``x,v,u,theta``; 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "v", "u", "theta"])
        for row in zip(g.x, s.v, s.u, s.theta):
            w.writerow([f"{val:.17g}" for val in row])


def read_snapshot(path, t: float = 0.0) -> tuple[np.ndarray, FieldState]:
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], FieldState(t, data[:, 1], data[:, 2], data[:, 3])
