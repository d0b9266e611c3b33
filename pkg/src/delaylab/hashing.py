"""Hashing relation between slow and fast frequencies at fixed eps and the
enumeration of control-induced Hopf points B+-_{m,j}.

At eps = 1/omega_k a frequency omega_tilde splits into Omega = eps*omega_tilde
- (2m+1) and omega = omega_tilde mod 2pi, related by

    Omega = eps * (omega + (pi/2)(1 - (-1)^k - (-1)^m) - 2 pi j).

Hopf points are the intersections of these steep lines with the two-scale
curves H = 0.  Internally everything is computed for odd k (reference
parity) and mapped to even k by omega -> omega + pi.
"""
from dataclasses import dataclass, asdict
import math

import numpy as np
from scipy import optimize

from . import twoscale as ts
from .charpoly import psi_derivatives, eval_psi
from .scaling import PI, parity_sign, reduce_omega

GRID = 2048
TANGENCY = 1e-8


def phase(k, m):
    return 0.5 * PI * (1 - parity_sign(k) - parity_sign(m))


def hash_residual(eps, k, m, j, omega, Omega):
    return Omega - eps * (omega + phase(k, m) - 2 * PI * j)


def unwrap(omega, k, m, j):
    """Fast frequency omega_tilde from its representative omega and (k, m, j)."""
    wt = omega + 2 * PI * (k * m + (k + 1) // 2 + (m + 1) // 2 - j)
    if not wt > 0:
        raise ValueError(f"unwrapped frequency {wt} is not positive")
    return wt


def j_of(eps, k, m, omega, Omega):
    """Hashing index j for a point (omega, Omega) on a hashing line."""
    return int(round((omega + phase(k, m) - Omega / eps) / (2 * PI)))


@dataclass
class HopfPoint:
    m: int
    j: int
    branch: str
    omega: float
    Omega: float
    omega_tilde: float
    B: float
    eps: float
    crossing_sign: int = 0
    multiple: bool = False
    tangent: bool = False

    @property
    def mu(self):
        return 1j * self.omega_tilde

    def to_dict(self):
        return asdict(self)


def _a(m, j):
    # odd-k hashing offset: Omega = eps (omega - a pi)
    return 2 * j - 1 + 0.5 * parity_sign(m)


class _Curve:
    """Odd-k two-scale curve for one m, parametrized so that each piece is a
    graph: by Omega for m = 0 (two separate branches), by omega for m >= 1
    (one arc with its minimum of Omega at omega = pi Omega_lower/2)."""

    def __init__(self, m, n=GRID):
        self.m = m
        self.delta = 1.0 / (2 * m + 1)
        d = self.delta
        if m == 0:
            Om = np.linspace(-1.0, 0.0, n)
            wp, wm = ts.omega_branches(d, Om, 1)
            self.pieces = {"+": ("Omega", Om, wp), "-": ("Omega", Om, wm)}
        else:
            b = ts.domain_bounds(m)
            wlow = b.omega_at_min
            wl = np.linspace(-PI / 2, wlow, n)
            wr = np.linspace(wlow, PI / 2, n)
            self.pieces = {"-": ("omega", ts.Omega_of_omega(d, wl), wl),
                           "+": ("omega", ts.Omega_of_omega(d, wr), wr)}
            self.omega_low = wlow
            self.Omega_low = b.Omega_lower

    def point(self, branch, t):
        """(Omega, omega) at parameter t on a piece."""
        kind = self.pieces[branch][0]
        d = self.delta
        if kind == "Omega":
            wp, wm = ts.omega_branches(d, t, 1)
            return t, float(wp if branch == "+" else wm)
        return ts.Omega_of_omega(d, t), t

    def param_range(self, branch):
        kind, Om, w = self.pieces[branch]
        return (Om if kind == "Omega" else w)


def _G(curve, branch, eps, a, t):
    Om, w = curve.point(branch, t)
    return Om - eps * (w - a * PI)


def _odd_to_parity(omega_odd, k):
    if k % 2:
        return omega_odd
    return reduce_omega(omega_odd + PI)


def crossing_rate(mu, scale, B):
    psi_mu, _, psi_B = psi_derivatives(mu, scale, B)
    return -psi_B / psi_mu


def crossing_direction(point, scale, B=None):
    """Sign of d Re mu / dB at a simple eigenvalue on the imaginary axis.

    point is a HopfPoint, or an eigenvalue mu together with B.
    """
    if isinstance(point, HopfPoint):
        if point.tangent:
            return 0
        mu, B = point.mu, point.B
    else:
        mu = complex(point)
    rate = crossing_rate(mu, scale, B)
    if abs(rate.real) <= 1e-12 * max(abs(rate), 1e-300):
        return 0
    return int(np.sign(rate.real))


def hopf_points(scale, m, n=GRID, eps=None, k=None):
    """All Hopf points of resonance m at eps = 1/omega_k (or a given eps).

    For each hashing index j the line is intersected with every monotone
    piece of the curve: sign changes on an n-point grid are refined by
    Brent's method.  Points at Omega = 0 (trivial Hopf pair for m=0, B=0
    corner for m >= 1) and at Omega = -1 (zero eigenvalue) are not Hopf
    points of the nontrivial kind and are dropped.
    """
    k = scale.k if k is None else k
    eps = scale.eps if eps is None else eps
    curve = _Curve(m, n)
    d = curve.delta
    out = []
    base = {}
    for br in ("-", "+"):
        t = curve.param_range(br)
        kind, Om, w = curve.pieces[br]
        base[br] = (t, Om - eps * w)
    gmin = min(v.min() for _, v in base.values())
    j = 1
    while gmin + eps * _a(m, j) * PI < 0:
        a = _a(m, j)
        found = {"-": [], "+": []}
        for br in ("-", "+"):
            t, g0 = base[br]
            g = g0 + eps * a * PI
            sg = np.sign(g)
            idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
            for i in idx:
                tr = optimize.brentq(lambda x: _G(curve, br, eps, a, x), t[i], t[i + 1],
                                     xtol=1e-15, rtol=1e-15)
                found[br].append(tr)
            # exact zeros on grid nodes (rare)
            for i in np.nonzero(sg == 0)[0]:
                found[br].append(t[i])
        for br in ("-", "+"):
            many = len(found[br]) > 1
            for tr in found[br]:
                Om, w_odd = curve.point(br, tr)
                if abs(Om) < 1e-13 or (m == 0 and Om <= -1 + 1e-13):
                    continue
                w = _odd_to_parity(w_odd, k)
                par = k % 2
                B = float(ts.B_from_omega(d, Om, w, par))
                wt = (Om + 2 * m + 1) / eps
                jj = j_of(eps, k, m, w, Om)
                hp = HopfPoint(m, jj, br, float(w), float(Om), float(wt), B, eps,
                               multiple=many)
                if m >= 1:
                    slope = ts.dOmega_domega(d, Om, w_odd, 1)
                    hp.tangent = bool(abs(slope - eps) < TANGENCY * eps)
                out.append(hp)
        j += 1
    if eps == scale.eps and k == scale.k:
        for hp in out:
            hp.crossing_sign = crossing_direction(hp, scale)
    else:
        for hp in out:
            hp.crossing_sign = _crossing_at_eps(hp, k)
    out.sort(key=lambda h: (h.branch, h.j, h.omega))
    return out


def _crossing_at_eps(hp, k):
    from .scaling import ProblemScale
    sc = ProblemScale(k)
    psi_mu, _, psi_B = psi_derivatives(hp.mu, sc, hp.B, eps=hp.eps)
    r = -psi_B / psi_mu
    return int(np.sign(r.real)) if not hp.tangent else 0


def find_point(points, branch, j, which="max"):
    """Select B^branch_{m,j} from an enumeration (max B for multiple + hits)."""
    c = [p for p in points if p.branch == branch and p.j == j]
    if not c:
        return None
    return max(c, key=lambda p: p.B) if which == "max" else min(c, key=lambda p: p.B)


def hopf_B(scale, m, j, branch, eps=None):
    pts = hopf_points(scale, m, eps=eps)
    p = find_point(pts, branch, j)
    return None if p is None else p.B


def psi_residual(hp, scale):
    return abs(eval_psi(hp.mu, scale, hp.B, eps=hp.eps))


def all_hopf_points(scale, m_max=None, eps=None):
    """Hopf points for m = 0 .. m_max (default k + 2).

    Empty m can be followed by nonempty ones (k = 10: m = 6 has none, m = 7
    has one), and no odd m >= k intersects, so k + 2 is a safe default.
    """
    if m_max is None:
        m_max = scale.k + 2
    return {m: hopf_points(scale, m, eps=eps) for m in range(m_max + 1)}
