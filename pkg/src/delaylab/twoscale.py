"""The epsilon-free two-scale characteristic equation.

Frequencies are split into the slow offset Omega from the odd resonance
Omega_m = 2m+1 = 1/delta and the fast angle omega (mod 2 pi).  Purely
imaginary eigenvalues correspond to the zero set of

    H(delta, Omega, omega) = Omega~ sin(pi Omega/2) - (-1)^k cos(omega - pi Omega/2)

with control B = (-1)^k sin^2(pi Omega/2) / cos(omega), Omega~ = Omega + 1/delta.
Eliminating omega gives the quadratic

    Q = (Omega~^2 - 1) B^2 + Omega~ sin(pi Omega~) B + cos^2(pi Omega~/2) = 0.

All trigonometry is done in terms of Omega rather than Omega~, using
cos(pi Omega~/2) = -(-1)^m sin(pi Omega/2), which keeps full relative
accuracy near the resonance Omega = 0 for large m.  Odd k is the reference
parity; even k shifts omega by pi.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from .scaling import PI

def m_of(delta):
    m = (1.0 / delta - 1) / 2
    mi = int(round(m))
    if abs(m - mi) > 1e-9 or mi < 0:
        raise ValueError(f"delta={delta} is not 1/(2m+1)")
    return mi


def _ksign(parity):
    return -1.0 if parity % 2 else 1.0


def eval_H(delta, Omega, omega, parity=1):
    Omega = np.asarray(Omega, dtype=float)
    Wt = Omega + 1.0 / delta
    return Wt * np.sin(PI * Omega / 2) - _ksign(parity) * np.cos(omega - PI * Omega / 2)


def eval_H_tilde(delta, Omega, omega, parity=1):
    """H written with Omega~ only (the form used before the resonance split)."""
    m = m_of(delta)
    Wt = np.asarray(Omega, dtype=float) + 1.0 / delta
    s = _ksign(parity)
    return (-1) ** (m + 1) * (Wt * np.cos(PI * Wt / 2) - s * np.sin(omega - PI * Wt / 2))


def _arccos_arg(delta, Omega):
    Omega = np.asarray(Omega, dtype=float)
    return -(Omega + 1.0 / delta) * np.sin(PI * Omega / 2)


def omega_branches(delta, Omega, parity=1):
    """The two frequencies omega+-(Omega) on the two-scale curve.

    For odd k and m=0 the minus branch is continued into [pi, 3pi/2];
    for m >= 1 both stay in [-pi/2, pi/2].  Even k adds pi (mod 2pi).
    """
    m = m_of(delta)
    arg = _arccos_arg(delta, Omega)
    if np.any(np.abs(arg) > 1 + 1e-12):
        raise ValueError("Omega outside the discriminant domain")
    A = np.arccos(np.clip(arg, -1.0, 1.0))
    half = PI * np.asarray(Omega, dtype=float) / 2
    wp = half + A
    wm = half - A + (2 * PI if m == 0 else 0.0)
    if parity % 2 == 0:
        wp = wp + PI
        wm = wm + PI - (2 * PI if m == 0 else 0.0)
    return wp, wm


def discriminant(delta, Omega):
    Omega = np.asarray(Omega, dtype=float)
    S = np.sin(PI * Omega / 2)
    Wt = Omega + 1.0 / delta
    return S * S * (1 - (Wt * S) ** 2)


def Q_residual(delta, Omega, B):
    Omega = np.asarray(Omega, dtype=float)
    S = np.sin(PI * Omega / 2)
    C = np.cos(PI * Omega / 2)
    Wt = Omega + 1.0 / delta
    return (Wt * Wt - 1) * B * B - 2 * Wt * S * C * B + S * S


def B_from_omega(delta, Omega, omega, parity=1):
    c = np.cos(omega)
    if np.any(np.abs(c) < 1e-12):
        raise ZeroDivisionError("cos(omega) vanishes: omega at +-pi/2")
    S = np.sin(PI * np.asarray(Omega, dtype=float) / 2)
    return _ksign(parity) * S * S / c


def B_branches(delta, Omega):
    """Both roots (B+, B-) of Q at given Omega (vectorized).

    With S, C = sin, cos(pi Omega/2) and P = Omega~ C + sqrt(1 - Omega~^2 S^2)
    the roots are B+ = S/P and B- = S P / (Omega~^2 - 1).  P is a sum of
    nonnegative terms on the domain, so neither form cancels; for m = 0 the
    apparent pole at Omega~ = 1 is divided out exactly, giving B- -> pi/2.
    """
    m = m_of(delta)
    Omega = np.asarray(Omega, dtype=float)
    S = np.sin(PI * Omega / 2)
    C = np.cos(PI * Omega / 2)
    Wt = Omega + 1.0 / delta
    r2 = 1 - (Wt * S) ** 2
    if np.any(r2 < -1e-13):
        raise ValueError("negative discriminant: Omega outside the curve domain")
    P = Wt * C + np.sqrt(np.clip(r2, 0, None))
    Bp = S / P
    if m == 0:
        # S / Omega = (pi/2) sinc(Omega/2), and Omega~^2 - 1 = Omega (Omega + 2)
        Bm = (PI / 2) * np.sinc(Omega / 2) * P / (Omega + 2)
    else:
        Bm = S * P / ((Wt - 1) * (Wt + 1))
    if Omega.ndim == 0:
        return float(Bp), float(Bm)
    return Bp, Bm


def chi0(delta, Omega, omega, B, parity=1):
    """Complex two-scale characteristic function."""
    Wt = Omega + 1.0 / delta
    return (Wt + _ksign(parity) * 1j * np.exp(1j * omega)
            - np.sin(PI * Omega / 2) * np.exp(1j * PI * Omega / 2) / B)


@dataclass(frozen=True)
class DomainBounds:
    m: int
    Omega_lower_tilde: float
    Omega_max_tilde: float

    @property
    def Omega_lower(self):
        return self.Omega_lower_tilde - (2 * self.m + 1)

    @property
    def omega_at_min(self):
        return PI * self.Omega_lower / 2


def _bisect(f, lo, hi, tol=1e-15):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


_bounds_cache = {}


def domain_bounds(m):
    """Zeros of the discriminant around the resonance 2m+1 (m >= 1).

    The lower end solves Omega~ (-1)^m cos(pi Omega~/2) = 1 in (2m, 2m+1);
    the upper end solves the same with right-hand side -1 in (2m+1, 2m+2).
    """
    if m < 1:
        raise ValueError("domain bounds exist for m >= 1 only")
    if m in _bounds_cache:
        return _bounds_cache[m]
    Om = 2 * m + 1
    off = 1e-9
    lower = _bisect(lambda Wt: -Wt * math.sin(PI * (Wt - Om) / 2) - 1.0,
                    2 * m + off, Om - off)
    upper = _bisect(lambda Wt: Wt * math.sin(PI * (Wt - Om) / 2) - 1.0,
                    Om + off, 2 * m + 2 - off)
    out = DomainBounds(m, lower, upper)
    _bounds_cache[m] = out
    return out


def Omega_lower(delta):
    return domain_bounds(m_of(delta)).Omega_lower


def Omega_of_omega(delta, omega, parity=1):
    """Slow offset Omega(omega) on the m >= 1 curve, for odd-k omega in
    [-pi/2, pi/2] (even k: omega in [pi/2, 3pi/2]).

    For fixed omega, H(., omega) changes sign exactly once on
    [Omega_lower, 0], so a vectorized bisection is used.
    """
    m = m_of(delta)
    if m < 1:
        raise ValueError("Omega(omega) is single valued only for m >= 1")
    w = np.asarray(omega, dtype=float)
    if parity % 2 == 0:
        w = w - PI
    lo = np.full(w.shape, Omega_lower(delta))
    hi = np.zeros(w.shape)
    # H(lo) <= 0 <= H(hi) for odd k
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        hm = eval_H(delta, mid, w, 1)
        up = hm > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    out = 0.5 * (lo + hi)
    return float(out) if out.ndim == 0 else out


def dOmega_domega(delta, Omega, omega, parity=1):
    """Slope of the curve H = 0 viewed as Omega(omega)."""
    s = _ksign(parity)
    Wt = Omega + 1.0 / delta
    x = omega - PI * Omega / 2
    H_Om = np.sin(PI * Omega / 2) + Wt * (PI / 2) * np.cos(PI * Omega / 2) - s * (PI / 2) * np.sin(x)
    H_om = s * np.sin(x)
    return -H_om / H_Om


def _B_along(delta, omega):
    """B on the odd-k m>=1 curve parametrized by omega."""
    Om = Omega_of_omega(delta, omega)
    return B_from_omega(delta, Om, omega, 1)


def critical_points_Bminus(delta, n=4096):
    """Zeros of d(Omega, omega) = sin^2(pi Omega/2) sin(omega)
    + (pi/2) cos(omega) sin(omega - pi Omega) along the minus branch (odd k).
    """
    b = domain_bounds(m_of(delta))
    w_lo, w_hi = -PI / 2, b.omega_at_min

    def d(w):
        Om = Omega_of_omega(delta, w)
        return (np.sin(PI * Om / 2) ** 2 * np.sin(w)
                + (PI / 2) * np.cos(w) * np.sin(w - PI * Om))

    ws = np.linspace(w_lo + 1e-9, w_hi - 1e-12, n)
    ds = d(ws)
    out = []
    for i in np.nonzero(np.sign(ds[:-1]) * np.sign(ds[1:]) < 0)[0]:
        w = optimize.brentq(lambda x: float(d(x)), ws[i], ws[i + 1], xtol=1e-15, rtol=1e-15)
        out.append((Omega_of_omega(delta, w), w))
    return out


def B_min(delta):
    """Minimum of B over the m >= 1 curve and where it is attained."""
    pts = critical_points_Bminus(delta)
    if not pts:
        raise RuntimeError("no interior minimum of B found")
    vals = [B_from_omega(delta, Om, w, 1) for Om, w in pts]
    i = int(np.argmin(vals))
    return float(vals[i]), pts[i]


def star_intersection(delta):
    """Point of the (odd-k) curve on the line omega = pi*Omega."""
    m = m_of(delta)
    if m < 1:
        raise ValueError("m >= 1 required")
    b = domain_bounds(m)
    # on omega = pi Omega the curve equation reduces to Omega~ sin + cos = 0
    f = lambda Om: eval_H(delta, Om, PI * Om, 1)
    lo, hi = b.Omega_lower, -1e-300
    if f(lo) * f(hi) > 0:
        raise RuntimeError("line omega = pi*Omega misses the curve")
    Om = optimize.brentq(f, lo, hi, xtol=1e-16, rtol=1e-15)
    w = PI * Om
    if not (-PI / 2 < w < b.omega_at_min):
        raise RuntimeError("intersection not on the minus branch (delta too large)")
    return Om, w


def sample_curve(delta, n=200, parity=1):
    """Rows (delta, Omega, omega+, omega-, B+, B-, D) on the B<0 part of the curve."""
    m = m_of(delta)
    lo = -1.0 if m == 0 else Omega_lower(delta)
    Om = np.linspace(lo, 0.0, n + 2)[1:-1] if m == 0 else np.linspace(lo, 0.0, n)
    wp, wm = omega_branches(delta, Om, parity)
    Bp, Bm = B_branches(delta, Om)
    D = discriminant(delta, Om)
    return np.column_stack([np.full_like(Om, delta), Om, wp, wm, Bp, Bm, D])
