"""Unstable dimension E(B), trapping scans, instability intervals and the
Pyragas stabilization interval."""
from dataclasses import dataclass, field
import math

import numpy as np

from . import contour
from .charpoly import (Eigenvalue, RootError, eval_psi, newton_root,
                       psi_derivatives, psi_scale)
from .hashing import all_hopf_points, find_point, hopf_points
from .scaling import PI, entourage_of, make_scale

ETA = 1e-9


@dataclass
class SpectrumReport:
    k: int
    B: float
    E: int
    winding: complex
    roots: list = field(default_factory=list)
    eta: float = ETA
    r_real: float = 0.0
    r_imag: float = 0.0

    @property
    def winding_residual(self):
        return float(abs(self.winding - self.E))

    def to_dict(self):
        return {
            "k": self.k, "B": self.B, "E": self.E,
            "winding_residual": self.winding_residual,
            "roots": [{"re": r.mu.real, "im": r.mu.imag, "residual": r.residual}
                      for r in self.roots],
            "contour": {"eta": self.eta, "r_real": self.r_real, "r_imag": self.r_imag},
        }


def root_radius(scale, B):
    """Every root with Re mu >= 0 has |mu| <= (|B| + 1) / (eps |B|)."""
    return (abs(B) + 1) / (scale.eps * abs(B))


def _logd(scale, B):
    def f(z):
        psi = eval_psi(z, scale, B)
        d = psi_derivatives(z, scale, B)[0]
        return d / psi
    return f


def _newton(scale, B):
    def go(z0):
        try:
            r = newton_root(z0, scale, B)
        except RootError:
            return None
        # newton_root folds roots to Im >= 0; keep the one nearest the guess
        z = r.mu
        if z0.imag < 0 and z.imag > 0:
            z = z.conjugate()
        return z
    return go


def count_unstable(scale, B, with_roots=True, eta=ETA, tol=1e-6):
    """Number of roots of psi with Re mu > 0, counted with multiplicity.

    The rectangle [eta, R] x [-R, R] with R slightly above root_radius
    encloses every such root.  eta > 0 keeps roots on the imaginary axis
    (the trivial pair +-i omega_k, Hopf points) outside the count.
    """
    if B == 0:
        raise ValueError("B = 0 is not allowed")
    R = 1.001 * root_radius(scale, B) + 1.0
    rect = contour.Rect(eta, R, -R, R)
    logd = _logd(scale, B)
    w = None
    for attempt in range(3):
        try:
            w = contour.winding(logd, rect, tol)
            break
        except contour.ContourError:
            rect = contour.Rect(rect.x0 * 10, R, -R * 1.01, R * 1.01)
    if w is None:
        raise contour.ContourError(f"winding failed at B={B}")
    E = int(round(w.real))
    rep = SpectrumReport(scale.k, float(B), E, complex(w), eta=rect.x0, r_real=rect.x1,
                         r_imag=rect.y1)
    if abs(w - E) > 0.1:
        raise contour.ContourError(f"non-integral winding {w} at B={B}")
    if with_roots and E > 0:
        rep.roots = locate_roots(scale, B, rect, E)
    return rep


def locate_roots(scale, B, rect, E):
    """Unstable roots with Im >= 0, refined by Newton's method."""
    logd = _logd(scale, B)
    # upper half only: conjugates are implied; the real axis is split off first
    boxes = contour.isolate(logd, rect, E, _newton(scale, B))
    seen = []
    for c in boxes:
        z = c.root
        if z.imag < -1e-12:
            continue
        z = complex(z.real, abs(z.imag)) if abs(z.imag) > 1e-12 else complex(z.real, 0.0)
        res = float(abs(eval_psi(z, scale, B)))
        ent = entourage_of(z.imag, scale) if z.imag > 0 else None
        seen.append(Eigenvalue(z, res, ent))
    seen.sort(key=lambda e: (-e.mu.real, e.mu.imag))
    return seen


def parity_rule(k, B):
    """Parity of E(B) predicted by the zero-eigenvalue crossing at B=(-1)^k."""
    if B == (-1) ** k:
        raise ValueError("mu = 0 is a root on B = (-1)^k; parity is undefined there")
    if B == 0:
        raise ValueError("B = 0 is not allowed")
    if k % 2:
        if B < -1:
            return 1
        if B < 0:
            return 0
        return 1
    if B < 0:
        return 0
    if B < 1:
        return 1
    return 0


@dataclass
class TrappingReport:
    k: int
    B: float
    minimum: float
    where: complex
    lines: int

    @property
    def ok(self):
        return self.minimum > 1e-8


def trapping_check(scale, B, re_max=20.0, im_max=None, n=4001, exclusion=0.1):
    """Minimum of |psi| over mu = x + i (l + 1/2) pi, 0 <= x <= re_max,
    0 <= (l + 1/2) pi <= im_max, away from the trivial root i omega_k."""
    if not B < 0:
        raise ValueError("trapping holds for B < 0")
    if im_max is None:
        im_max = 5 * scale.omega_k
    ys = (np.arange(0, int(im_max / PI + 0.5)) + 0.5) * PI
    ys = ys[ys <= im_max]
    xs = np.linspace(0, re_max, n)
    Z = xs[None, :] + 1j * ys[:, None]
    V = np.abs(eval_psi(Z, scale, B))
    mask = np.abs(Z - 1j * scale.omega_k) < exclusion
    V = np.where(mask, np.inf, V)
    i = np.unravel_index(np.argmin(V), V.shape)
    z0 = Z[i]
    # local refinement in x along the same line
    from scipy.optimize import minimize_scalar
    dx = xs[1] - xs[0]
    lo, hi = max(0.0, z0.real - dx), min(re_max, z0.real + dx)

    def g(x):
        z = complex(x, z0.imag)
        if abs(z - 1j * scale.omega_k) < exclusion:
            return 1e300
        return abs(eval_psi(z, scale, B))
    r = minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    best = min(V[i], r.fun)
    where = z0 if V[i] <= r.fun else complex(r.x, z0.imag)
    return TrappingReport(scale.k, B, float(best), where, len(ys))


@dataclass
class Interval:
    m: int
    j: int
    B_minus: float
    B_plus: float
    kind: str = ""      # "gap" / "overlap" relative to j+1, "" when undecided


def instability_intervals(scale, m, points=None):
    """Intervals I_{m,j} = (B-_{m,j}, max B+_{m,j}) and their relation to I_{m,j+1}."""
    pts = hopf_points(scale, m) if points is None else points
    js = sorted({p.j for p in pts if p.branch == "-"})
    out = []
    for j in js:
        bm = find_point(pts, "-", j).B
        bp = find_point(pts, "+", j)
        if bp is None:
            # the plus intersection degenerates to the corner B = 0 (odd m, j = 1)
            Bp = 0.0
        else:
            Bp = bp.B
        out.append(Interval(m, j, bm, Bp))
    for iv in out:
        nxt = find_point(pts, "+", iv.j + 1)
        if nxt is not None:
            iv.kind = "gap" if nxt.B < iv.B_minus else "overlap"
    return out


@dataclass
class PyragasInterval:
    k: int
    B_lower: float
    B_upper: float
    eps: float
    verified: bool = False
    E_mid: int = -1
    E_below: int = -1
    E_above: int = -1
    inequalities: dict = field(default_factory=dict)

    @property
    def b_lower(self):
        return 2 * self.eps * self.B_lower

    @property
    def b_upper(self):
        return 2 * self.eps * self.B_upper

    @property
    def b_mid(self):
        return 0.5 * (self.b_lower + self.b_upper)

    def to_dict(self):
        return {"k": self.k, "b_lower": self.b_lower, "b_upper": self.b_upper,
                "B_lower": self.B_lower, "B_upper": self.B_upper,
                "verified": self.verified, "E_mid": self.E_mid,
                "E_below": self.E_below, "E_above": self.E_above,
                "inequalities": self.inequalities}


def pyragas_bounds(scale):
    """(B+_{0,1}, B-_{1,1}) from the Hopf enumeration."""
    p0 = find_point(hopf_points(scale, 0), "+", 1)
    p1 = find_point(hopf_points(scale, 1), "-", 1)
    if p0 is None or p1 is None:
        raise RuntimeError(f"Pyragas boundary points missing at k={scale.k}")
    return p0.B, p1.B


def pyragas_interval(scale, verify=True, rel_offset=1e-2):
    """Pyragas interval (B+_{0,1}, B-_{1,1}) with spectral verification and
    the ordering checks that make it the stable window."""
    if scale.k < 1:
        raise ValueError("k >= 1 required")
    Bl, Bu = pyragas_bounds(scale)
    out = PyragasInterval(scale.k, Bl, Bu, scale.eps)
    out.inequalities = inequality_report(scale, Bl, Bu)
    if verify and Bl < Bu < 0:
        mid = 0.5 * (Bl + Bu)
        out.E_mid = count_unstable(scale, mid, with_roots=False).E
        out.E_below = count_unstable(scale, Bl - rel_offset * abs(Bl), with_roots=False).E
        out.E_above = count_unstable(scale, Bu + rel_offset * abs(Bu), with_roots=False).E
        out.verified = out.E_mid == 0 and out.E_below > 0 and out.E_above > 0
    return out


def inequality_report(scale, Bl, Bu):
    """Orderings that make (B+_{0,1}, B-_{1,1}) the only stable window:
    every B+_{m, j_m+1} lies below B+_{0,1}, B+_{0,1} < B-_{1,1}, and every
    B-_{m,j} with j <= j_m lies at or above B-_{1,1}."""
    pts = all_hopf_points(scale, m_max=scale.k + 2)
    worst_plus, worst_minus = -np.inf, np.inf
    fails_plus, fails_minus = [], []
    for m, ps in pts.items():
        if m == 0 or not ps:
            continue
        jm = (m + 1) // 2
        p = find_point(ps, "+", jm + 1)
        if p is not None:
            worst_plus = max(worst_plus, p.B)
            if not p.B < Bl:
                fails_plus.append((m, jm + 1, p.B))
        for q in ps:
            if q.branch == "-" and q.j <= jm:
                worst_minus = min(worst_minus, q.B)
                if not (Bu <= q.B or (m == 1 and q.j == 1)):
                    fails_minus.append((m, q.j, q.B))
    return {
        "max_B_plus_m_jm1_below_B01": {"ok": not fails_plus, "max": worst_plus,
                                       "violations": fails_plus},
        "B01_below_B11": {"ok": bool(Bl < Bu)},
        "B11_below_B_minus_m_j": {"ok": not fails_minus, "min": worst_minus,
                                  "violations": fails_minus},
    }


def smallest_valid_k(k_max=40):
    """Smallest k whose window ends exist and pass every inequality_report check.

    Returns None when no k <= k_max qualifies.
    """
    for k in range(1, k_max + 1):
        s = make_scale(k)
        try:
            Bl, Bu = pyragas_bounds(s)
        except RuntimeError:
            continue
        if all(v["ok"] for v in inequality_report(s, Bl, Bu).values()):
            return k
    return None
