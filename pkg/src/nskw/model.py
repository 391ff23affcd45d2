"""Constitutive laws, scalar functionals and the parameter-regime classifier.

Everything here is a pure function of scalars (or numpy arrays where noted)
and carries no grid dependence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

__all__ = [
    "ParamSet",
    "Theorem",
    "RegimeVerdict",
    "pressure",
    "phi",
    "entropy_density",
    "entropy_s",
    "entropy_far_field",
    "g_func",
    "f_func",
    "classify_thm11",
    "classify_thm12",
    "kanel_psi",
    "kanel_phi_cap",
]

# Absolute tolerance for the line beta = 2*alpha - 3 (decimal config inputs).
LINE_TOL = 1e-12
QUAD_EPSABS = 1e-10


@dataclass(frozen=True)
class ParamSet:
    """Physical and constitutive constants.

    ``mu = rho**alpha``, ``kappa = rho**beta`` and heat conductivity
    ``theta**lam``; ``c_v = R / (gamma - 1)`` is derived on construction.
    """

    alpha: float
    beta: float
    lam: float
    gamma: float = 1.4
    R: float = 1.0
    A: float = 1.0
    c_v: float = field(init=False)

    def __post_init__(self):
        for name in ("alpha", "beta", "lam", "gamma", "R", "A"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.R > 0.0:
            raise ValueError(f"R must be positive, got {self.R}")
        if not self.A > 0.0:
            raise ValueError(f"A must be positive, got {self.A}")
        object.__setattr__(self, "c_v", self.R / (self.gamma - 1.0))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "lambda": self.lam,
            "gamma": self.gamma,
            "R": self.R,
            "A": self.A,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParamSet":
        return cls(
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            lam=float(d["lambda"]),
            gamma=float(d.get("gamma", 1.4)),
            R=float(d.get("R", 1.0)),
            A=float(d.get("A", 1.0)),
        )


class Theorem(str, enum.Enum):
    THM11 = "Thm11"
    THM12 = "Thm12"
    NONE = "None"


@dataclass(frozen=True)
class RegimeVerdict:
    theorem: Theorem
    case_label: str
    lambda_ok: bool = True

    def __post_init__(self):
        if self.case_label in ("i", "ii", "iii", "iv", "v"):
            assert self.theorem is Theorem.THM11
        elif self.case_label in ("a", "b"):
            assert self.theorem is Theorem.THM12
        elif self.case_label != "none":
            raise ValueError(f"unknown case label {self.case_label!r}")

    @property
    def covered(self) -> bool:
        return self.case_label != "none"


def _positive(name, x):
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0.0):
        raise ValueError(f"{name} must be positive")
    return arr


def _scalar_or_array(arr):
    return float(arr) if arr.ndim == 0 else arr


def pressure(v, theta, p: ParamSet):
    """Ideal-gas pressure ``R * theta / v``."""
    v = _positive("v", v)
    theta = _positive("theta", theta)
    return _scalar_or_array(p.R * theta / v)


def phi(x):
    """``x - ln x - 1``; nonnegative with its only zero at ``x = 1``."""
    x = _positive("x", x)
    return _scalar_or_array(x - np.log(x) - 1.0)


def entropy_density(v, u, theta, p: ParamSet):
    """Convex entropy ``R phi(v) + u**2/2 + c_v phi(theta)``."""
    u = np.asarray(u, dtype=float)
    out = p.R * np.asarray(phi(v)) + 0.5 * u * u + p.c_v * np.asarray(phi(theta))
    return _scalar_or_array(np.asarray(out))


def entropy_s(v, theta, p: ParamSet):
    """Thermodynamic entropy ``s`` obtained by inverting
    ``R theta / v = A v**-gamma exp((gamma - 1) s / R)``.
    """
    v = _positive("v", v)
    theta = _positive("theta", theta)
    s = p.c_v * np.log(p.R * theta * v ** (p.gamma - 1.0) / p.A)
    return _scalar_or_array(s)


def entropy_far_field(p: ParamSet) -> float:
    """Entropy of the constant state ``(v, theta) = (1, 1)``."""
    return p.c_v * math.log(p.R / p.A)


def g_func(alpha: float, beta: float) -> float:
    return ((alpha + 1.0) ** 2 + (beta + 5.0) ** 2) / 4.0 - (beta + 5.0) * (
        alpha + beta + 7.0
    ) / 6.0


def f_func(beta: float) -> float:
    """Root ``alpha = f(beta)`` of ``g(alpha, beta) = 0`` for beta in [-5, -2]."""
    if not -5.0 <= beta <= -2.0:
        raise ValueError(f"f_func requires -5 <= beta <= -2, got {beta}")
    # radicand vanishes at both endpoints; guard tiny negative rounding
    radicand = max(-2.0 * beta * beta - 14.0 * beta - 20.0, 0.0)
    return (beta + 2.0) / 3.0 + math.sqrt(radicand) / 3.0


def _thm11_cases(alpha: float, beta: float) -> list[str]:
    hits = []
    if alpha == 0.0 and beta == -2.0:
        hits.append("i")
    if alpha < -2.0 * beta - 4.0 and beta >= -1.5:
        hits.append("ii")
    if alpha < -beta - 2.5 and -2.0 <= beta < -1.5:
        hits.append("iii")
    if -3.0 <= beta < -2.0:
        hits.append("iv")
    if alpha > -2.0 * beta - 5.0 and beta < -3.0:
        hits.append("v")
    return hits


def classify_thm11(alpha: float, beta: float, lam: float) -> RegimeVerdict:
    """Match ``(alpha, beta)`` against the five global-existence cases.

    The case sets are disjoint; a double match raises ``AssertionError``
    rather than silently picking the first.
    """
    hits = _thm11_cases(float(alpha), float(beta))
    assert len(hits) <= 1, f"overlapping cases {hits} at ({alpha}, {beta})"
    lambda_ok = bool(lam >= 1.0)
    if not hits:
        return RegimeVerdict(Theorem.NONE, "none", lambda_ok)
    return RegimeVerdict(Theorem.THM11, hits[0], lambda_ok)


def classify_thm12(alpha: float, beta: float) -> RegimeVerdict:
    if alpha == 0.0 and beta == -2.0:
        return RegimeVerdict(Theorem.THM12, "a")
    if abs(beta - (2.0 * alpha - 3.0)) <= LINE_TOL and -3.0 <= beta < -2.0:
        return RegimeVerdict(Theorem.THM12, "b")
    return RegimeVerdict(Theorem.NONE, "none")


def _kanel_integral(v, exponent: float) -> float:
    v = float(v)
    if not v > 0.0:
        raise ValueError(f"v must be positive, got {v}")
    if v == 1.0:
        return 0.0

    def integrand(z):
        # max() guards rounding below zero very close to z = 1
        return math.sqrt(max(z - math.log(z) - 1.0, 0.0)) / z**exponent

    lo, hi = (1.0, v) if v > 1.0 else (v, 1.0)
    val, _ = integrate.quad(integrand, lo, hi, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)
    return val if v > 1.0 else -val


def kanel_psi(v, beta: float):
    """Signed integral of ``sqrt(phi(z)) / z**((beta+5)/2)`` from 1 to ``v``.

    Accepts a scalar or an array of positive values.
    """
    exponent = 0.5 * (beta + 5.0)
    arr = _positive("v", v)
    if arr.ndim == 0:
        return _kanel_integral(arr, exponent)
    return np.array([_kanel_integral(x, exponent) for x in arr.ravel()]).reshape(arr.shape)


def kanel_phi_cap(v, alpha: float):
    """Signed integral of ``sqrt(phi(z)) / z**(alpha+1)`` from 1 to ``v``."""
    exponent = alpha + 1.0
    arr = _positive("v", v)
    if arr.ndim == 0:
        return _kanel_integral(arr, exponent)
    return np.array([_kanel_integral(x, exponent) for x in arr.ravel()]).reshape(arr.shape)
