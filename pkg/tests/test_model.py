import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nskw.model import (
    ParamSet,
    Theorem,
    _thm11_cases,
    classify_thm11,
    classify_thm12,
    entropy_density,
    entropy_far_field,
    entropy_s,
    f_func,
    g_func,
    kanel_phi_cap,
    kanel_psi,
    phi,
    pressure,
)

# Frozen from mpmath.quad at 30 digits (see test_kanel_matches_mpmath for the live oracle).
PSI_2_BETA_M3 = 0.18417084499411471
PHI_CAP_3_ALPHA_0 = 0.48688776396363699
PSI_02_BETA_M2 = -1.3439292644953421


def test_paramset_derives_cv():
    p = ParamSet(0.0, -2.0, 1.0, gamma=1.4, R=8.314)
    assert p.c_v == 8.314 / (1.4 - 1.0)


@pytest.mark.parametrize("kw", [{"gamma": 1.0}, {"gamma": 0.5}, {"R": 0.0}, {"A": -1.0}])
def test_paramset_rejects_bad_constants(kw):
    with pytest.raises(ValueError):
        ParamSet(0.0, -2.0, 1.0, **kw)


@pytest.mark.parametrize(
    "v, theta, R, expected",
    [(1.0, 1.0, 1.0, 1.0), (2.0, 1.0, 1.0, 0.5), (0.5, 3.0, 8.314, 49.884)],
)
def test_pressure(v, theta, R, expected):
    assert pressure(v, theta, ParamSet(0, -2, 1, R=R)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("v, theta", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
def test_pressure_domain(v, theta):
    with pytest.raises(ValueError):
        pressure(v, theta, ParamSet(0, -2, 1))


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (2.0, 0.306853), (0.5, 0.193147)])
def test_phi_values(x, expected):
    assert phi(x) == pytest.approx(expected, abs=5e-7)


def test_phi_domain():
    with pytest.raises(ValueError):
        phi(0.0)


def test_phi_nonnegative_random():
    rng = np.random.default_rng(1)
    x = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), 10_000))
    vals = phi(x)
    assert vals.min() >= 0.0
    assert np.all(vals[np.abs(x - 1.0) > 1e-6] > 0.0)


@pytest.mark.parametrize(
    "state, expected",
    [((1.0, 0.0, 1.0), 0.0), ((2.0, 0.0, 1.0), 0.306853), ((1.0, 2.0, 1.0), 2.0)],
)
def test_entropy_density(state, expected):
    p = ParamSet(0, -2, 1, gamma=1.4, R=1.0)
    assert entropy_density(*state, p) == pytest.approx(expected, abs=5e-7)


def test_entropy_density_positive_off_equilibrium():
    rng = np.random.default_rng(2)
    p = ParamSet(0, -2, 1, gamma=1.3, R=2.0)
    v = rng.uniform(0.05, 5, 1000)
    u = rng.uniform(-3, 3, 1000)
    th = rng.uniform(0.05, 5, 1000)
    assert np.all(entropy_density(v, u, th, p) > 0.0)


def test_entropy_s_examples():
    p = ParamSet(0, -2, 1, gamma=2.0, R=1.0, A=1.0)
    assert entropy_s(1.0, 1.0, p) == 0.0
    assert entropy_far_field(p) == 0.0
    assert entropy_s(1.0, math.e, p) == pytest.approx(1.0, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.01, 100.0),
    st.floats(0.01, 100.0),
    st.floats(1.01, 3.0),
    st.floats(0.1, 10.0),
    st.floats(0.1, 10.0),
)
def test_entropy_s_round_trip(v, theta, gamma, R, A):
    p = ParamSet(0, -2, 1, gamma=gamma, R=R, A=A)
    s = entropy_s(v, theta, p)
    rebuilt = A * v ** (-gamma) * math.exp((gamma - 1.0) * s / R)
    assert rebuilt == pytest.approx(pressure(v, theta, p), rel=1e-12)


def test_g_values():
    assert g_func(0.0, -2.0) == 0.0
    assert g_func(0.0, 0.0) == pytest.approx(26 / 4 - 35 / 6, rel=1e-15)
    assert g_func(0.0, 0.0) == pytest.approx(0.666667, abs=5e-7)
    assert g_func(-1.0, -5.0) == 0.0


def test_f_endpoints():
    assert f_func(-2.0) == pytest.approx(0.0, abs=1e-15)
    assert f_func(-5.0) == pytest.approx(-1.0, abs=1e-15)


@pytest.mark.parametrize("beta", [-5.0001, -1.9, 0.0])
def test_f_domain(beta):
    with pytest.raises(ValueError):
        f_func(beta)


def test_f_is_root_of_g():
    assert abs(g_func(f_func(-3.5), -3.5)) <= 1e-10
    for beta in np.linspace(-5.0, -2.0, 100):
        assert abs(g_func(f_func(beta), beta)) <= 1e-10


@pytest.mark.parametrize(
    "alpha, beta, lam, case, lam_ok",
    [
        (0.0, -2.0, 1.0, "i", True),
        (-10.0, -1.0, 2.0, "ii", True),
        (-1.0, -1.8, 1.0, "iii", True),
        (1.0, -2.5, 1.0, "iv", True),
        (5.0, -4.0, 1.0, "v", True),
        (0.0, -2.0, 0.5, "i", False),
        (5.0, 0.0, 1.0, "none", True),
    ],
)
def test_classify_thm11(alpha, beta, lam, case, lam_ok):
    v = classify_thm11(alpha, beta, lam)
    assert v.case_label == case
    assert v.lambda_ok is lam_ok
    assert v.theorem is (Theorem.NONE if case == "none" else Theorem.THM11)


def test_classify_thm11_boundaries_follow_inequalities():
    # beta = -3/2 belongs to (ii), not (iii); beta = -2 with alpha != 0 to (iii) only if alpha < -1/2
    assert classify_thm11(-2.0, -1.5, 1).case_label == "ii"
    assert classify_thm11(-1.0, -2.0, 1).case_label == "iii"
    assert classify_thm11(-0.5, -2.0, 1).case_label == "none"
    assert classify_thm11(0.0, -3.0, 1).case_label == "iv"
    # (v) needs alpha > -2*beta - 5 = 1.0002 here
    assert classify_thm11(1.0, -3.0001, 1).case_label == "none"
    assert classify_thm11(1.0003, -3.0001, 1).case_label == "v"


@pytest.mark.parametrize(
    "alpha, beta, case",
    [(0.0, -2.0, "a"), (0.25, -2.5, "b"), (0.0, -3.0, "b"), (1.0, -1.0, "none"), (0.5, -2.0, "none")],
)
def test_classify_thm12(alpha, beta, case):
    assert classify_thm12(alpha, beta).case_label == case


def test_classify_thm12_line_tolerance():
    assert classify_thm12(0.1 + 0.2, 2 * (0.1 + 0.2) - 3 + 5e-13).case_label == "b"
    assert classify_thm12(0.3, 2 * 0.3 - 3 + 1e-9).case_label == "none"


def test_thm11_cases_pairwise_disjoint():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-20, 20, size=(100_000, 2))
    # include the exact special point and half-integer boundary lines
    pts[:5] = [(0, -2), (-1, -1.5), (0, -3), (2, -3.5), (-0.5, -2)]
    for a, b in pts:
        assert len(_thm11_cases(a, b)) <= 1


def test_special_point_in_both_theorems():
    assert classify_thm11(0, -2, 1).case_label == "i"
    assert classify_thm12(0, -2).case_label == "a"


def test_kanel_zero_at_one():
    assert kanel_psi(1.0, -3.0) == 0.0
    assert kanel_phi_cap(1.0, 0.0) == 0.0


def test_kanel_frozen_values():
    assert kanel_psi(2.0, -3.0) == pytest.approx(PSI_2_BETA_M3, abs=1e-8)
    assert kanel_phi_cap(3.0, 0.0) == pytest.approx(PHI_CAP_3_ALPHA_0, abs=1e-8)
    assert kanel_psi(0.2, -2.0) == pytest.approx(PSI_02_BETA_M2, abs=1e-8)


def test_kanel_matches_mpmath():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 25
    for v, beta in [(0.05, -3.0), (0.7, -1.0), (4.0, -2.5), (25.0, -4.0)]:
        k = (beta + 5) / 2
        ref = mp.quad(lambda z: mp.sqrt(z - mp.log(z) - 1) / z**k, [1, v])
        assert kanel_psi(v, beta) == pytest.approx(float(ref), abs=1e-8)


def test_kanel_sign_and_domain():
    assert kanel_psi(0.5, -2.0) < 0 < kanel_psi(1.5, -2.0)
    with pytest.raises(ValueError):
        kanel_psi(0.0, -2.0)
    with pytest.raises(ValueError):
        kanel_phi_cap(-1.0, 0.0)


def test_kanel_psi_unbounded_towards_vacuum():
    vals = [kanel_psi(v, -3.0) for v in (1e-1, 1e-2, 1e-4, 1e-6)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < -30.0


def test_kanel_phi_cap_growth():
    ratios = [kanel_phi_cap(v, 0.0) / math.sqrt(v) for v in (100.0, 1e3, 1e4, 1e5)]
    assert min(ratios) > 1.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0), st.floats(-6.0, 2.0))
def test_kanel_psi_increasing(a, b, beta):
    if abs(a - b) < 1e-6:
        return
    lo, hi = sorted((a, b))
    assert kanel_psi(lo, beta) < kanel_psi(hi, beta)


def test_kanel_array_input():
    v = np.array([0.5, 1.0, 2.0])
    out = kanel_psi(v, -3.0)
    assert out.shape == (3,)
    assert out[2] == pytest.approx(PSI_2_BETA_M3, abs=1e-8)
