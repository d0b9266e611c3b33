import numpy as np
import pytest

from delaylab.charpoly import RootError, eval_psi, newton_root
from delaylab.hashing import find_point, hopf_points
from delaylab.scaling import make_scale
from delaylab.spectrum import (count_unstable, instability_intervals, parity_rule,
                               pyragas_interval, root_radius, smallest_valid_k,
                               trapping_check)


def newton_inventory(s, B, n=40):
    """Independent count: Newton from a grid of starts in the right half plane."""
    R = root_radius(s, B)
    found = []
    for x in np.linspace(0.05, R, n):
        for y in np.linspace(0.0, R, n):
            try:
                r = newton_root(complex(x, y), s, B)
            except RootError:
                continue
            z = r.mu
            if z.real > 1e-9 and not any(abs(z - w) < 1e-8 * max(1, abs(z)) for w in found):
                found.append(z)
    return sum(1 if w.imag == 0 else 2 for w in found)


@pytest.mark.parametrize("k,B", [(3, -0.9), (4, -0.3), (2, 0.5), (5, -3.0)])
def test_count_matches_newton_inventory(k, B):
    s = make_scale(k)
    rep = count_unstable(s, B)
    assert rep.E == newton_inventory(s, B)
    assert rep.winding_residual < 1e-3
    assert sum(1 if r.mu.imag == 0 else 2 for r in rep.roots) == rep.E
    assert all(r.residual < 1e-10 and r.mu.real > 0 for r in rep.roots)


def test_k3_parity_example():
    assert count_unstable(make_scale(3), -0.9).E % 2 == 0


def test_zero_B():
    with pytest.raises(ValueError):
        count_unstable(make_scale(1), 0.0)


def test_report_schema():
    d = count_unstable(make_scale(2), -1e8).to_dict()
    assert set(d) == {"k", "B", "E", "winding_residual", "roots", "contour"}
    assert set(d["contour"]) == {"eta", "r_real", "r_imag"}
    assert d["E"] == 2 and set(d["roots"][0]) == {"re", "im", "residual"}


def test_jump_by_two_across_hopf(k10):
    for m, br, j in [(1, "-", 1), (0, "+", 1), (0, "+", 3)]:
        p = find_point(hopf_points(k10, m), br, j)
        d = 1e-4 * abs(p.B)
        lo = count_unstable(k10, p.B - d, with_roots=False).E
        hi = count_unstable(k10, p.B + d, with_roots=False).E
        assert hi - lo == 2 * p.crossing_sign


@pytest.mark.parametrize("k", [3, 4])
def test_jump_by_one_across_zero_line(k):
    s = make_scale(k)
    B0 = (-1) ** k
    lo = count_unstable(s, B0 * (1 - 1e-3), with_roots=False).E
    hi = count_unstable(s, B0 * (1 + 1e-3), with_roots=False).E
    assert abs(hi - lo) == 1


def test_parity_rule_table():
    assert [parity_rule(3, B) for B in (-2, -0.5, 0.5)] == [1, 0, 1]
    assert [parity_rule(4, B) for B in (-2, 0.5, 2)] == [0, 1, 0]
    with pytest.raises(ValueError):
        parity_rule(4, 1.0)


def test_no_pyragas_region_for_positive_B():
    for k in (3, 4):
        s = make_scale(k)
        for B in np.geomspace(1e-3, 1e3, 9):
            assert count_unstable(s, B, with_roots=False).E >= 1


def test_trapping():
    for k, B in [(7, -0.5), (4, -2.0)]:
        r = trapping_check(make_scale(k), B)
        assert r.ok and r.minimum > 1e-4
    s = make_scale(7)
    assert abs(eval_psi(1j * s.omega_k, s, -0.5)) < 1e-13
    with pytest.raises(ValueError):
        trapping_check(s, 0.5)


def test_intervals_m1_k49(k49):
    ivs = instability_intervals(k49, 1)
    assert ivs[0].j == 1 and ivs[0].B_plus == 0.0
    assert ivs[0].kind == "gap"
    assert all(iv.kind == "overlap" for iv in ivs[1:-1])


def test_overlap_onset_m3():
    # B+_{3,4} = -0.0129546 < B-_{3,3} = -0.0125629 at k = 99 (confirmed by a
    # scan of Im B(omega~) = 0), so the j = 3 overlap only appears near k = 119
    ivs = {iv.j: iv for iv in instability_intervals(make_scale(99), 3)}
    assert ivs[1].kind == ivs[2].kind == "gap"
    assert ivs[3].kind == "gap"
    assert ivs[3].B_minus == pytest.approx(-0.01256287893860, rel=1e-10)
    ivs = {iv.j: iv for iv in instability_intervals(make_scale(149), 3)}
    assert ivs[1].kind == ivs[2].kind == "gap"
    assert ivs[3].kind == "overlap"


def test_pyragas_k49(k49):
    iv = pyragas_interval(k49)
    assert iv.verified and iv.E_mid == 0
    assert iv.b_lower < iv.b_upper < 0
    assert iv.b_lower == pytest.approx(2 * k49.eps * iv.B_lower, rel=1e-15)
    assert all(v["ok"] for v in iv.inequalities.values())
    # B in (B-_{1,1}, 0) is unstable
    for B in np.linspace(iv.B_upper, 0, 6)[1:-1]:
        assert count_unstable(k49, B, with_roots=False).E >= 2


def test_smallest_valid_k():
    # B-_{1,1} does not exist at k = 1, 2; from k = 3 on every ordering holds
    assert smallest_valid_k(12) == 3
