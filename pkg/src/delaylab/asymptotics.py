"""Truncated small-eps and small-delta series for Hopf points, the Pyragas
boundaries and the two-scale curve, plus log-log order fits used to check
them against the exact numerics."""
from dataclasses import dataclass, field
import math

import numpy as np

from .scaling import PI, ResonanceIndex


@dataclass
class ExpansionResult:
    quantity: str
    value: float
    indices: tuple = ()
    order: int = 2
    tag: str = ""


def alpha(m, j, branch):
    """Slope coefficients of the hashing line positions at the resonance."""
    s = (-1) ** m
    if branch == "-":
        return 4 * j + s - 1
    if branch == "+":
        return 4 * j + s - 3
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


def eps_expand(m, j, branch, eps, parity=1):
    """(Omega, omega, B) of the Hopf point B^branch_{m,j}, to second order in eps.

    omega is given for odd k; even k (parity 0) adds pi.  The minus-branch
    B series divides by m and is not defined for m = 0.  The plus-branch
    series uses m + 1 and covers m = 0 (the lower Pyragas boundary).
    """
    if m < 0 or j < 1:
        raise ValueError("need m >= 0 and j >= 1")
    if branch == "-" and m == 0:
        raise ValueError("minus-branch series needs m >= 1")
    a = alpha(m, j, branch)
    x = PI * eps / 2
    if branch == "-":
        Om = a * (-x + 2 * m * x * x)
        om = (PI / 2) * (-1 + 2 * m * a * x)
        B = (PI / (4 * m)) * a * (-x + (4 * m * m - a) * x * x / (2 * m))
    else:
        n = m + 1
        Om = a * (-x - 2 * n * x * x)
        om = (PI / 2) * (1 - 2 * n * a * x)
        B = (PI / (4 * n)) * a * (-x - (4 * n * n + a) * x * x / (2 * n))
    if parity % 2 == 0:
        om += PI
    return Om, om, B


@dataclass
class BoundarySeries:
    eps: float
    b_lower: float
    b_upper: float
    B01_plus: float
    B11_minus: float

    def B_m_jm_minus(self, m):
        return eps_expand(m, ResonanceIndex(m, 1).j_m, "-", self.eps)[2]

    def B_m_jm1_plus(self, m):
        return eps_expand(m, ResonanceIndex(m, 1).j_m + 1, "+", self.eps)[2]


def boundary_expansion(scale):
    """Pyragas boundaries b = 2 eps B to third order and the scaled ends."""
    if scale.k < 1:
        raise ValueError("k >= 1 required")
    e = scale.eps
    b_lo = -0.5 * PI ** 2 * e ** 2 - 0.75 * PI ** 3 * e ** 3
    b_up = -0.5 * PI ** 2 * e ** 2 + 0.25 * PI ** 3 * e ** 3
    B01 = eps_expand(0, 1, "+", e)[2]
    B11 = eps_expand(1, 1, "-", e)[2]
    return BoundarySeries(e, b_lo, b_up, B01, B11)


@dataclass
class DeltaSeries:
    Omega: float
    B: float
    eps_plus: float
    eps_minus: float
    B01_at_eps_plus: float
    B11_at_eps_minus: float


def delta_expand(delta, omega):
    """Small-delta series of the curve point at fast angle omega (|omega| <= pi/2),
    the eps values where the hashing lines through it hit the Pyragas ends,
    and the Pyragas ends at those eps."""
    if abs(omega) > PI / 2 + 1e-15:
        raise ValueError("|omega| <= pi/2 required")
    if not delta > 0:
        raise ValueError("delta > 0 required")
    c, s = math.cos(omega), math.sin(omega)
    d = delta
    w = 2 * omega / PI
    Om = -(2 * c / PI) * (d - s * d * d)
    B = -c * (d * d - 2 * s * d ** 3)
    k = (2 / PI) ** 2 * c
    eps_p = k * (d * d + (w - 2 - s) * d ** 3)
    eps_m = k * (d * d + (w + 2 - s) * d ** 3)
    B01 = -c * (d * d + (w - 2 - s) * d ** 3)
    B11 = -c * (d * d + (w + 2 - s) * d ** 3)
    return DeltaSeries(Om, B, eps_p, eps_m, B01, B11)


def b_min_expansion(delta):
    return -delta * delta


def order_fit(samples):
    """Least-squares slope of log(error) against log(h).

    Returns inf when some error is exactly zero (agreement to the last bit).
    """
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    h = np.array([s[0] for s in samples], dtype=float)
    err = np.abs(np.array([s[1] for s in samples], dtype=float))
    if np.any(h <= 0):
        raise ValueError("step sizes must be positive")
    if np.any(err == 0):
        return math.inf
    slope = np.polyfit(np.log(h), np.log(err), 1)[0]
    return float(slope)


def expansion_rows(ks, ms=(1, 2, 3), jmax_extra=1):
    """CSV rows (k, quantity, numeric, series, residual) comparing enumerated
    Hopf points with their eps series."""
    from .hashing import hopf_points, find_point
    from .scaling import make_scale
    rows = []
    for k in ks:
        sc = make_scale(k)
        for m in ms:
            pts = hopf_points(sc, m)
            jm = ResonanceIndex(m, 1).j_m
            for j in range(1, jm + 1 + jmax_extra):
                for br in ("-", "+"):
                    p = find_point(pts, br, j)
                    if p is None:
                        continue
                    Om, om, B = eps_expand(m, j, br, sc.eps, sc.parity)
                    tag = f"B{br}[{m},{j}]"
                    rows.append((k, tag, p.B, B, p.B - B))
                    rows.append((k, f"Omega{br}[{m},{j}]", p.Omega, Om, p.Omega - Om))
    return rows
