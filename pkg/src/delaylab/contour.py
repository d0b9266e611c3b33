"""Argument-principle root counting and isolation for entire functions on
axis-parallel rectangles.

Each edge is integrated with composite 8-point Gauss-Legendre applied to
f'/f.  A panel is accepted once its value agrees with the sum over its two
halves and the phase change across it is small; otherwise it is bisected.
All panels of one refinement level are evaluated in a single vectorized call.
"""
from dataclasses import dataclass, field

import numpy as np

_X, _W = np.polynomial.legendre.leggauss(8)
REL_FLOOR = 1e-6
MAX_PANELS = 200_000


class ContourError(RuntimeError):
    pass


def _panel(logd, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    z = mid[:, None] + half[:, None] * _X[None, :]
    return (logd(z) * _W[None, :]).sum(axis=1) * half


def edge_integral(logd, za, zb, breaks=None, tol=1e-6, max_level=64):
    """Integral of f'/f along the segment za -> zb.

    breaks: increasing parameters in [0, 1] giving the initial panels.
    tol is an absolute tolerance on the whole edge, distributed by length.
    """
    if breaks is None:
        breaks = np.linspace(0, 1, 2)
    t = np.asarray(breaks, dtype=float)
    pts = za + (zb - za) * t
    a, b = pts[:-1], pts[1:]
    L = abs(zb - za)
    whole = _panel(logd, a, b)
    total = 0j
    for _ in range(max_level):
        if a.size == 0:
            return total
        m = 0.5 * (a + b)
        left = _panel(logd, a, m)
        right = _panel(logd, m, b)
        both = left + right
        # the relative floor covers rounding noise in f near a root at
        # distance eta from the edge: f'/f is only good to ~1e-16/eta there
        seg_tol = tol * np.abs(b - a) / L + REL_FLOOR * np.abs(both) + 1e-15
        ok = (np.abs(both - whole) <= seg_tol) & (np.abs(both.imag) < 1.0)
        ok &= np.isfinite(both)
        total += both[ok].sum()
        bad = ~ok
        a, b, m = a[bad], b[bad], m[bad]
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        whole = np.concatenate([left[bad], right[bad]])
        if a.size > MAX_PANELS:
            break
    raise ContourError("edge quadrature did not converge (root on or near the contour?)")


def _breaks_uniform(length, h):
    n = max(1, int(np.ceil(length / h)))
    return np.linspace(0, 1, n + 1)


def _breaks_graded(x0, x1, h=0.5, near=30.0, ratio=1.3):
    """Panels of width h over [x0, x0+near], then growing geometrically."""
    L = x1 - x0
    if L <= near:
        return _breaks_uniform(L, h)
    xs = list(np.arange(0, near, h))
    x, w = near, h
    while x < L:
        xs.append(x)
        w *= ratio
        x += w
    xs.append(L)
    return np.asarray(xs) / L


@dataclass
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def center(self):
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains(self, z, slack=0.0):
        return (self.x0 - slack <= z.real <= self.x1 + slack
                and self.y0 - slack <= z.imag <= self.y1 + slack)


def winding(logd, rect, tol=1e-6, h=0.5):
    """(1/2 pi i) times the contour integral of f'/f around rect (ccw)."""
    r = rect
    A = complex(r.x0, r.y0)
    Bc = complex(r.x1, r.y0)
    C = complex(r.x1, r.y1)
    D = complex(r.x0, r.y1)
    hb = _breaks_graded(r.x0, r.x1, h)
    vb = _breaks_uniform(r.height, h)
    I = (edge_integral(logd, A, Bc, hb, tol)
         + edge_integral(logd, Bc, C, vb, tol)
         + edge_integral(logd, C, D, 1 - hb[::-1], tol)
         + edge_integral(logd, D, A, vb, tol))
    return I / (2j * np.pi)


@dataclass
class RootCluster:
    rect: Rect
    count: int
    root: complex = None


def isolate(logd, rect, count, newton, min_size=1e-7, tol=1e-6, h=0.5, jitter=0.0137):
    """Split rect recursively until each box holds one root that Newton's
    method can find from the box center.

    newton(z0) -> complex root or None.  Returns a list of RootCluster.
    """
    out = []
    stack = [(rect, count)]
    while stack:
        r, n = stack.pop()
        if n == 0:
            continue
        size = max(r.width, r.height)
        if n == 1 and size < 2.0:
            z = newton(r.center)
            if z is not None and r.contains(z, 1e-9 * max(1.0, abs(z))):
                out.append(RootCluster(r, 1, z))
                continue
        if size < min_size:
            out.append(RootCluster(r, n, r.center))
            continue
        # split the long side slightly off-center to avoid symmetric root lines
        for frac in (0.5 + jitter, 0.5 - 2.3 * jitter, 0.5 + 4.1 * jitter):
            if r.width >= r.height:
                c = r.x0 + frac * r.width
                kids = [Rect(r.x0, c, r.y0, r.y1), Rect(c, r.x1, r.y0, r.y1)]
            else:
                c = r.y0 + frac * r.height
                kids = [Rect(r.x0, r.x1, r.y0, c), Rect(r.x0, r.x1, c, r.y1)]
            try:
                ws = [winding(logd, kr, tol, h) for kr in kids]
            except ContourError:
                continue
            ns = [int(round(w.real)) for w in ws]
            if sum(ns) == n and all(abs(w - m) < 0.1 for w, m in zip(ws, ns)):
                stack.extend(zip(kids, ns))
                break
        else:
            raise ContourError("could not split a box consistently")
    return out
