import math

import numpy as np
import pytest

from nskw.grid import (
    Bounds,
    FieldState,
    Grid,
    d1,
    d2,
    integrate,
    make_initial,
    read_snapshot,
    write_snapshot,
)
from nskw.model import ParamSet

P = ParamSet(0.0, -2.0, 1.0)


def test_grid_geometry():
    g = Grid(5.0, 64)
    assert g.dx * g.N == pytest.approx(10.0, rel=1e-15)
    assert g.x[0] == -5.0 and g.x[-1] == 5.0
    assert np.all(np.diff(g.x) > 0)
    assert np.array_equal(g.x, -g.x[::-1])


@pytest.mark.parametrize("L, N", [(0.0, 64), (1.0, 8), (1.0, 32.5)])
def test_grid_rejects(L, N):
    with pytest.raises(ValueError):
        Grid(L, N)


def test_operators_annihilate_constants():
    g = Grid(3.0, 32)
    c = np.full(g.size, 2.5)
    assert np.all(d1(c, g) == 0.0)
    assert np.max(np.abs(d2(c, g))) < 1e-12


def test_d1_exact_on_linear():
    g = Grid(3.0, 32)
    assert np.allclose(d1(0.7 * g.x - 2.0, g), 0.7, atol=1e-13, rtol=0)


def test_d2_exact_on_quadratic():
    g = Grid(1.0, 40)
    assert np.allclose(d2(g.x**2, g), 2.0, atol=1e-10, rtol=0)


def test_length_mismatch():
    g = Grid(1.0, 16)
    for op in (d1, d2, integrate):
        with pytest.raises(ValueError):
            op(np.zeros(g.size + 1), g)


def _err(op, exact, N):
    g = Grid(math.pi, N)
    return np.abs(op(np.sin(g.x), g) - exact(g.x)).max()


def test_d1_second_order():
    ratio = _err(d1, np.cos, 64) / _err(d1, np.cos, 128)
    assert 3.5 < ratio < 4.5


def test_d2_second_order():
    # at N=64 the one-sided boundary stencil still dominates
    ratio = _err(d2, lambda x: -np.sin(x), 128) / _err(d2, lambda x: -np.sin(x), 256)
    assert 3.5 < ratio < 4.5


def test_integrate():
    g = Grid(5.0, 64)
    assert integrate(np.ones(g.size), g) == pytest.approx(10.0, rel=1e-14)
    assert abs(integrate(g.x, g)) <= 1e-14
    assert abs(integrate(np.sin(g.x) * np.exp(-g.x**2) + g.x**3, g)) <= 1e-14


def test_integrate_second_order():
    errs = [abs(integrate(Grid(1.0, n).x ** 2, Grid(1.0, n)) - 2.0 / 3.0) for n in (32, 64, 128)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=1e-6)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=1e-6)


def test_d1_reflection_equivariance():
    g = Grid(4.0, 64)
    f = np.exp(-((g.x - 0.7) ** 2)) + 0.1 * g.x
    lhs = d1(f[::-1], g)
    rhs = -d1(f, g)[::-1]
    assert np.array_equal(lhs[1:-1], rhs[1:-1])


def test_make_initial_zero_amplitude_is_constant():
    g = Grid(10.0, 64)
    for kind in ("gaussian", "tanh_front", "fourier_mix"):
        s = make_initial(kind, {}, g, P, seed=1)
        assert np.all(s.v == 1.0) and np.all(s.u == 0.0) and np.all(s.theta == 1.0)


def test_gaussian_extrema():
    g = Grid(20.0, 512)
    s = make_initial("gaussian", {"v": 0.5}, g, P, width=1.0)
    assert s.v.min() == pytest.approx(1.0, abs=1e-9)
    assert s.v.max() == pytest.approx(1.5, abs=1e-9)
    assert s.bounds == Bounds(s.v.min(), s.v.max(), 1.0, 1.0)


@pytest.mark.parametrize("kind", ["gaussian", "tanh_front", "fourier_mix"])
def test_far_field_and_bounds(kind):
    g = Grid(20.0, 256)
    s = make_initial(kind, {"v": 0.4, "u": 0.2, "theta": -0.3}, g, P, seed=3, width=2.0)
    for f, base in ((s.v, 1.0), (s.u, 0.0), (s.theta, 1.0)):
        assert f[0] == base and f[-1] == base
        assert abs(f[1] - base) < 1e-6 and abs(f[-2] - base) < 1e-6
    b = s.bounds
    assert b.v_lo <= s.v.min() and s.v.max() <= b.v_hi
    assert b.theta_lo <= s.theta.min() and s.theta.max() <= b.theta_hi
    assert s.is_positive()


def test_fourier_mix_deterministic():
    g = Grid(20.0, 256)
    a = make_initial("fourier_mix", {"v": 0.3, "theta": 0.2}, g, P, seed=42, width=3.0)
    b = make_initial("fourier_mix", {"v": 0.3, "theta": 0.2}, g, P, seed=42, width=3.0)
    c = make_initial("fourier_mix", {"v": 0.3, "theta": 0.2}, g, P, seed=43, width=3.0)
    assert a.v.tobytes() == b.v.tobytes() and a.theta.tobytes() == b.theta.tobytes()
    assert not np.array_equal(a.v, c.v)


def test_rejects_near_vacuum_data():
    g = Grid(20.0, 256)
    with pytest.raises(ValueError, match="drops"):
        make_initial("gaussian", {"v": -0.9995}, g, P)


def test_rejects_declared_bounds_violation():
    g = Grid(20.0, 256)
    with pytest.raises(ValueError, match="declared"):
        make_initial("gaussian", {"v": 3.0}, g, P, bounds={"v": [0.5, 2.0], "theta": [0.5, 2.0]})


def test_rejects_unresolved_far_field():
    with pytest.raises(ValueError, match="far field"):
        make_initial("gaussian", {"v": 0.3}, Grid(2.0, 64), P, width=1.0)


def test_reflected_state():
    g = Grid(5.0, 32)
    s = make_initial("fourier_mix", {"v": 0.2, "u": 0.1}, g, P, seed=5)
    r = s.reflected()
    assert np.array_equal(r.v, s.v[::-1]) and np.array_equal(r.u, -s.u[::-1])


def test_snapshot_round_trip(tmp_path):
    g = Grid(5.0, 32)
    s = make_initial("fourier_mix", {"v": 0.2, "u": 0.1, "theta": 0.1}, g, P, seed=5)
    path = tmp_path / "snap.csv"
    write_snapshot(path, s, g)
    assert path.read_text().splitlines()[0] == "x,v,u,theta"
    x, back = read_snapshot(path)
    assert np.array_equal(x, g.x)
    assert np.array_equal(back.v, s.v) and np.array_equal(back.u, s.u)
    assert np.array_equal(back.theta, s.theta)


def test_fieldstate_shape_check():
    with pytest.raises(ValueError):
        FieldState(0.0, np.ones(4), np.zeros(5), np.ones(4))
