import numpy as np
import pytest

from delaylab.charpoly import (B_max, RootError, characteristic_residual, dmu_dB, eval_psi,
                               newton_root, psi_derivatives, real_eig_B, uncontrolled_spectrum)
from delaylab.scaling import PI, make_scale


def test_psi_matches_original_form():
    s = make_scale(5)
    rng = np.random.default_rng(1)
    mu = rng.normal(size=20) + 1j * rng.normal(scale=10, size=20)
    for B in (-0.3, 2.0):
        # psi = -eps B (mu - RHS) scaled by b = 2 eps B
        lhs = eval_psi(mu, s, B)
        rhs = -s.eps * B * characteristic_residual(mu, s, B)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_derivatives_fd():
    s = make_scale(4)
    mu, B, h = 0.3 + 7.1j, -0.7, 1e-6
    pm, pe, pB = psi_derivatives(mu, s, B)
    assert pm == pytest.approx((eval_psi(mu + h, s, B) - eval_psi(mu - h, s, B)) / (2 * h), rel=1e-7)
    assert pB == pytest.approx((eval_psi(mu, s, B + h) - eval_psi(mu, s, B - h)) / (2 * h), rel=1e-7)
    fe = lambda e: eval_psi(mu, s, B, eps=e)
    assert pe == pytest.approx((fe(s.eps + h) - fe(s.eps - h)) / (2 * h), rel=1e-6)


def test_zero_B_rejected():
    with pytest.raises(ValueError):
        eval_psi(1.0, make_scale(1), 0.0)


@pytest.mark.parametrize("k", range(1, 9))
def test_zero_root_line(k):
    s = make_scale(k)
    assert abs(eval_psi(0.0, s, (-1) ** k)) < 1e-14
    assert real_eig_B(1e-9, s) == pytest.approx((-1) ** k, rel=1e-6)


def test_trivial_root_every_B():
    s = make_scale(6)
    for B in (-5, -0.01, 0.3, 40):
        assert abs(eval_psi(1j * s.omega_k, s, B)) < 1e-12 * max(1, abs(B))


def test_B_max_k10():
    # mpmath reference from tests/make_oracles.py
    Bm, mu = B_max(make_scale(10))
    assert Bm == pytest.approx(6.3192598903997938, rel=1e-12)
    assert mu == pytest.approx(3.3297248760347479, abs=1e-6)


def test_B_max_errors():
    with pytest.raises(ValueError):
        B_max(make_scale(3))
    with pytest.raises(ValueError):
        B_max(make_scale(0))


def test_real_eig_B_pole():
    s = make_scale(1)
    # the uncontrolled real root of eps mu - exp(-mu) = 0 needs infinite B
    root = [r.mu.real for r in uncontrolled_spectrum(s) if r.mu.imag == 0][0]
    with pytest.raises(ZeroDivisionError):
        real_eig_B(root, s)


def test_newton_root_and_dmu():
    s = make_scale(2)
    B = -0.4
    r = newton_root(1.0 + 2.0j, s, B)
    assert r.residual < 1e-12
    h = 1e-6
    up = newton_root(r.mu, s, B + h).mu
    dn = newton_root(r.mu, s, B - h).mu
    assert dmu_dB(r.mu, s, B) == pytest.approx((up - dn) / (2 * h), rel=1e-6)


def test_uncontrolled_spectrum_k2():
    roots = uncontrolled_spectrum(make_scale(2))
    mus = [r.mu for r in roots]
    # trivial root and one complex root (mpmath reference)
    assert any(abs(m - 2.5j * PI) < 1e-12 for m in mus)
    assert any(abs(m - (1.1853869469154097 + 2.0872848710439609j)) < 1e-12 for m in mus)
    assert len(mus) == 2


@pytest.mark.parametrize("k", range(0, 7))
def test_uncontrolled_count(k):
    roots = uncontrolled_spectrum(make_scale(k))
    # floor(k/2) complex pairs + one real root for odd k, plus the trivial root
    assert len(roots) == k // 2 + k % 2 + 1
    assert all(r.residual < 1e-13 for r in roots)
