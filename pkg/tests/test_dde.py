import math

import numpy as np
import pytest

from delaylab import dde
from delaylab.scaling import PI, make_scale
from delaylab.spectrum import count_unstable, pyragas_interval


@pytest.fixture(scope="module")
def k3_interval():
    return pyragas_interval(make_scale(3), verify=False)


def test_nonlinearity_checks():
    dde.Nonlinearity()
    dde.Nonlinearity(np.tanh, lambda x: 1 / np.cosh(x) ** 2)
    with pytest.raises(ValueError):
        dde.Nonlinearity(lambda x: x)                       # f''' = 0
    with pytest.raises(ValueError):
        dde.Nonlinearity(lambda x: np.sin(x) + 0.01 * x * x)  # not odd
    with pytest.raises(ValueError):
        dde.Nonlinearity(lambda x: np.sin(2 * x))           # f'(0) = 2
    f = dde.Nonlinearity()
    assert f.describing_gain(1.0) == pytest.approx(0.8801011714551, rel=1e-10)  # 2 J1(1)


def test_grid_alignment():
    g = dde.Grid(3, 8)
    assert g.D * g.h == pytest.approx(1.0) and g.P * g.h == pytest.approx(make_scale(3).p_k / 2)
    assert dde.Grid(0, 8).H == 16          # p/2 = 2 exceeds the unit delay
    with pytest.raises(ValueError):
        dde.HistorySegment(g, np.zeros(5))
    with pytest.raises(ValueError):
        dde.integrate(make_scale(3), 1.0, -0.1, T=0.3 * g.h, N=8)


def test_equilibrium_preserved():
    s = make_scale(2)
    tr = dde.integrate(s, 1.2 * s.lambda_k, -0.05, T=3.0, N=16)
    assert np.all(tr.x == 0.0)


def test_convergence_order():
    s = make_scale(2)
    lam, b = 1.3 * s.lambda_k, -0.1
    end = {}
    for N in (4, 8, 16, 32):
        h = dde.HistorySegment.from_function(2, lambda t: 0.8 * np.cos(3 * t) + 0.2, N)
        end[N] = dde.integrate(s, lam, b, history=h, T=2.0, N=N).x[-1]
    e1, e2 = abs(end[4] - end[8]), abs(end[8] - end[16])
    e3 = abs(end[16] - end[32])
    assert math.log2(e1 / e2) >= 3.8 and math.log2(e2 / e3) >= 3.8


def test_linear_growth_rate():
    s = make_scale(1)
    mu = count_unstable(s, 1e8).roots[0].mu.real       # real unstable root, b = inf
    h = dde.HistorySegment.from_function(1, lambda t: 1e-6 * np.exp(mu * t), 64)
    tr = dde.integrate(s, s.lambda_k, math.inf, history=h, T=1.0)
    rate = math.log(tr.x[-1] / tr.x[h.grid.H])
    assert rate == pytest.approx(mu, rel=1e-2)


def test_orbit_k3_inside(k3_interval):
    s = make_scale(3)
    orb = dde.find_orbit(s, 1.05 * s.lambda_k, k3_interval.b_mid)
    assert orb.period == pytest.approx(s.p_k)
    assert orb.symmetry_residual < 1e-6
    assert orb.noninvasive_residual < 1e-6 * orb.amplitude
    assert abs(orb.half_period_residual - orb.full_period_residual) < 1e-8
    rep = dde.floquet(orb)
    assert rep.trivial_error < 1e-3
    assert rep.unstable_count == 0


def test_orbit_k3_outside(k3_interval):
    s = make_scale(3)
    orb = dde.find_orbit(s, 1.05 * s.lambda_k, 1.5 * k3_interval.b_lower)
    assert dde.floquet(orb).unstable_count >= 1


def test_uncontrolled_orbits_inherit_k():
    for k in (0, 2, 3):
        s = make_scale(k)
        orb = dde.find_orbit(s, 1.05 * s.lambda_k, math.inf)
        rep = dde.floquet(orb)
        assert rep.trivial_error < 1e-3
        assert rep.unstable_count == k


def test_k0_slow_orbit():
    orb = dde.find_orbit(make_scale(0), -1.1 * PI / 2, math.inf)
    assert orb.period == 4.0
    assert orb.symmetry_residual < 1e-6
    # long integration from a nearby history stays on the orbit
    hist = dde.HistorySegment(orb.grid, orb.history * 1.01)
    tr = dde.integrate(make_scale(0), -1.1 * PI / 2, math.inf, history=hist, T=40.0)
    # orbital stability: the phase may drift, the amplitude returns
    tail = tr.x[-(orb.grid.period_steps + 1):]
    assert np.max(np.abs(tail)) == pytest.approx(orb.amplitude, rel=1e-4)
    assert np.max(np.abs(hist.values)) == pytest.approx(1.01 * orb.amplitude)


def test_amplitude_square_root_law():
    s = make_scale(3)
    a = [dde.find_orbit(s, (1 + d) * s.lambda_k, math.inf).amplitude for d in (0.01, 0.02, 0.04)]
    assert a[1] / a[0] == pytest.approx(math.sqrt(2), rel=0.1)
    assert a[2] / a[0] == pytest.approx(2.0, rel=0.1)


def test_trivial_orbit_multipliers():
    # period map of the zero solution against exp(mu p) for the unstable roots
    s = make_scale(2)
    g = dde.Grid(2, 64)
    z = np.zeros(g.H + 1)
    orb = dde.PeriodicOrbit(2, s.lambda_k, math.inf, g, z, np.zeros(1), np.zeros(1),
                            s.p_k, 0.0, 0.0, 0.0, 0.0)
    rep = dde.multipliers_of(dde.monodromy(orb))
    mu = count_unstable(s, -1e8).roots[0].mu
    big = rep.multipliers[-1]
    assert abs(big) == pytest.approx(abs(np.exp(mu * s.p_k)), rel=0.02)


def test_bad_lambda():
    s = make_scale(3)
    with pytest.raises(dde.OrbitError):
        dde.find_orbit(s, 0.9 * s.lambda_k, -0.05)
