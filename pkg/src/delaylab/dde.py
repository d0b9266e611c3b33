"""Controlled delay equation

    x'(t) = lam f(x(t-1)) + a (x(t) + x(t - p/2)),   a = 1/b,

on a grid h = 1/(N(2k+1)) that contains both delays, its odd-symmetric
periodic orbits (x(t + p/2) = -x(t)) found by shooting, and their Floquet
multipliers.

The one-step method is classical RK4.  Delayed values at the stage times
t_i and t_i + h are grid values; at t_i + h/2 they come from a 4-point
Lagrange stencil that never straddles a point where the solution is
less smooth (t = 0, p/2, 1).  Linearizations are the exact derivatives of
the discrete scheme, so Newton and monodromy use the same discretization.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate as _quad, optimize

from .scaling import PI

BLOWUP = 1e100

# midpoint weights for x(i + 1/2) from points (i-1, i, i+1, i+2),
# (i, i+1, i+2, i+3) and (i-2, i-1, i, i+1)
_W_MID = np.array([-1.0, 9.0, 9.0, -1.0]) / 16
_W_RIGHT = np.array([5.0, 15.0, -5.0, 1.0]) / 16
_W_LEFT = np.array([1.0, -5.0, 15.0, 5.0]) / 16


class IntegrationError(RuntimeError):
    pass


class OrbitError(RuntimeError):
    pass


def _central(f, x, h, order):
    if order == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h ** 3)


class Nonlinearity:
    """Odd feedback nonlinearity with f'(0) = 1 and f'''(0) < 0.

    fprime is used for linearizations; without it a centered difference is used.
    """

    def __init__(self, f=None, fprime=None, name=None, check=True):
        if f is None:
            f, fprime, name = np.sin, np.cos, "sin"
        self.f = f
        self.name = name or getattr(f, "__name__", "f")
        self._fp = fprime
        if check:
            self.check()

    def __call__(self, x):
        return self.f(x)

    def prime(self, x):
        if self._fp is not None:
            return self._fp(x)
        h = 1e-6
        return (self.f(x + h) - self.f(x - h)) / (2 * h)

    def check(self):
        xs = np.linspace(-3, 3, 61)
        odd = np.max(np.abs(self.f(xs) + self.f(-xs)))
        if odd >= 1e-12:
            raise ValueError(f"f is not odd: max |f(x)+f(-x)| = {odd:.2e}")
        d1 = _central(self.f, 0.0, 1e-5, 1)
        if abs(d1 - 1) > 1e-6:
            raise ValueError(f"f'(0) = {d1} is not 1")
        d3 = _central(self.f, 0.0, 1e-2, 3)
        if not d3 < 0:
            raise ValueError(f"f'''(0) = {d3} is not negative")

    def describing_gain(self, A):
        """First harmonic gain (2/(pi A)) int_0^pi f(A sin t) sin t dt."""
        if A == 0:
            return 1.0
        v, _ = _quad.quad(lambda t: self.f(A * math.sin(t)) * math.sin(t), 0, PI)
        return 2 * v / (PI * A)


@dataclass
class Grid:
    k: int
    N: int

    @property
    def h(self):
        return 1.0 / (self.N * (2 * self.k + 1))

    @property
    def D(self):
        """Steps per unit delay."""
        return self.N * (2 * self.k + 1)

    @property
    def P(self):
        """Steps per half period p/2 = 2/(2k+1)."""
        return 2 * self.N

    @property
    def period_steps(self):
        return 4 * self.N

    @property
    def H(self):
        """History length in steps: the longer delay (p/2 = 2 > 1 for k = 0)."""
        return max(self.D, self.P)

    @property
    def span(self):
        return self.H * self.h


@dataclass
class HistorySegment:
    """Values on the grid t = -span, ..., -h, 0 (span = longest delay)."""
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        g = self.grid
        if g.N < 2 or g.N != int(g.N):
            raise ValueError("N must be an integer >= 2")
        if self.values.shape[0] != g.H + 1:
            raise ValueError(f"history needs {g.H + 1} values, got {self.values.shape[0]}")

    @property
    def times(self):
        return _hist_times(self.grid)

    @classmethod
    def from_function(cls, k, func, N=64):
        g = Grid(k, N)
        return cls(g, func(_hist_times(g)))


def _hist_times(g):
    return (np.arange(g.H + 1) - g.H) * g.h


def _stencil(n, lo, hi):
    """Indices and weights for x at n + 1/2 using points in [lo, hi]."""
    if n - 1 >= lo and n + 2 <= hi:
        return np.arange(n - 1, n + 3), _W_MID
    if n - 1 < lo and n + 3 <= hi:
        return np.arange(n, n + 4), _W_RIGHT
    if n + 2 > hi and n - 2 >= lo:
        return np.arange(n - 2, n + 2), _W_LEFT
    raise IntegrationError("smooth piece too short for the midpoint stencil")


class _Plan:
    """Stencils for every step of a run, in array index n = H + t/h."""

    def __init__(self, grid, nsteps):
        D, P, H = grid.D, grid.P, grid.H
        self.grid = grid
        self.nsteps = nsteps
        # t = 0 (x' jumps), t = p/2 and t = 1 (x'' jumps)
        breaks = np.array(sorted({H, H + P, H + D}))
        total = H + nsteps

        def plan(lag):
            idx = np.empty((nsteps, 4), dtype=int)
            w = np.empty((nsteps, 4))
            for s in range(nsteps):
                n = H + s - lag
                lo = max([0] + [b for b in breaks if b <= n])
                hi = min([total] + [b for b in breaks if b >= n + 1])
                hi = min(hi, H + s)
                idx[s], w[s] = _stencil(n, lo, hi)
            return idx, w

        self.iD, self.wD = plan(D)
        self.iP, self.wP = plan(P)


def _rhs_args(x, s, plan):
    D, P = plan.grid.D, plan.grid.P
    n = plan.grid.H + s
    d0, d2 = x[n - D], x[n - D + 1]
    d1 = np.tensordot(plan.wD[s], x[plan.iD[s]], axes=1)
    q0, q2 = x[n - P], x[n - P + 1]
    q1 = np.tensordot(plan.wP[s], x[plan.iP[s]], axes=1)
    return (d0, d1, d2), (q0, q1, q2)


def _rk4(x, s, plan, lam, a, fn, h):
    (d0, d1, d2), (q0, q1, q2) = _rhs_args(x, s, plan)
    y = x[plan.grid.H + s]
    g0, g1, g2 = lam * fn(d0), lam * fn(d1), lam * fn(d2)
    k1 = g0 + a * (y + q0)
    k2 = g1 + a * (y + 0.5 * h * k1 + q1)
    k3 = g1 + a * (y + 0.5 * h * k2 + q1)
    k4 = g2 + a * (y + h * k3 + q2)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), (d0, d1, d2)


def _rk4_linear(Y, s, plan, lam, a, coeffs, h):
    """Same scheme for y' = c(t) y(t-1) + a (y(t) + y(t-p/2)); c from the base run."""
    (d0, d1, d2), (q0, q1, q2) = _rhs_args(Y, s, plan)
    c0, c1, c2 = coeffs
    y = Y[plan.grid.H + s]
    k1 = c0 * d0 + a * (y + q0)
    k2 = c1 * d1 + a * (y + 0.5 * h * k1 + q1)
    k3 = c1 * d1 + a * (y + 0.5 * h * k2 + q1)
    k4 = c2 * d2 + a * (y + h * k3 + q2)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _control(b):
    if b is None or (isinstance(b, float) and math.isinf(b)):
        return 0.0
    if b == 0:
        raise ValueError("b = 0 is not allowed")
    return 1.0 / b


def _run(history, lam, b, f, nsteps, tangent=None):
    """March nsteps; returns the full array (history + new values) and, when
    tangent (H+1, c) is given, the matching tangent array."""
    g = history.grid
    plan = _Plan(g, nsteps)
    a = _control(b)
    h = g.h
    H = g.H
    x = np.empty(H + 1 + nsteps)
    x[:H + 1] = history.values
    Y = None
    if tangent is not None:
        Y = np.empty((H + 1 + nsteps,) + tangent.shape[1:])
        Y[:H + 1] = tangent
    for s in range(nsteps):
        x[H + s + 1], (d0, d1, d2) = _rk4(x, s, plan, lam, a, f, h)
        if not abs(x[H + s + 1]) < BLOWUP:
            raise IntegrationError(f"solution blew up at t = {(s + 1) * h:.4g}")
        if Y is not None:
            c = (lam * f.prime(d0), lam * f.prime(d1), lam * f.prime(d2))
            Y[H + s + 1] = _rk4_linear(Y, s, plan, lam, a, c, h)
    return x, Y


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray

    def rows(self):
        return np.column_stack([self.t, self.x])


def integrate(scale, lam, b, f=None, history=None, T=1.0, N=64):
    """Trajectory on [-1, T] (history included) with step h = 1/(N(2k+1)).

    b = inf (or None) switches the control off.
    """
    f = f or Nonlinearity()
    if history is None:
        history = HistorySegment.from_function(scale.k, np.zeros_like, N)
    g = history.grid
    if g.k != scale.k:
        raise ValueError("history grid built for a different k")
    nsteps = T / g.h
    if abs(nsteps - round(nsteps)) > 1e-9 * max(1.0, nsteps):
        raise ValueError(f"T = {T} is not a multiple of the step {g.h}")
    nsteps = int(round(nsteps))
    x, _ = _run(history, lam, b, f, nsteps)
    t = (np.arange(x.size) - g.H) * g.h
    return Trajectory(t, x)


@dataclass
class PeriodicOrbit:
    k: int
    lam: float
    b: float
    grid: Grid
    history: np.ndarray          # [-span, 0] on the grid
    t: np.ndarray                # one period [0, p]
    x: np.ndarray
    period: float
    amplitude: float
    symmetry_residual: float
    full_period_residual: float
    half_period_residual: float
    newton_steps: int = 0

    @property
    def noninvasive_residual(self):
        """sup |x(t) + x(t - p/2)|, the size of the control signal times b."""
        return self.symmetry_residual

    def to_dict(self):
        return {"k": self.k, "lambda": self.lam, "b": self.b, "N": self.grid.N,
                "period": self.period, "amplitude": self.amplitude,
                "symmetry_residual": self.symmetry_residual,
                "noninvasive_residual": self.noninvasive_residual,
                "full_period_residual": self.full_period_residual,
                "half_period_residual": self.half_period_residual,
                "newton_steps": self.newton_steps}


def _half_map(vals, grid, lam, b, f, tangent=False):
    """G(x) = -(history after p/2) and optionally its Jacobian."""
    hist = HistorySegment(grid, vals)
    H, P = grid.H, grid.P
    T0 = np.eye(H + 1) if tangent else None
    x, Y = _run(hist, lam, b, f, P, T0)
    G = -x[P:P + H + 1]
    J = -Y[P:P + H + 1] if tangent else None
    return G, J


def initial_guess(scale, lam, f, N=64):
    """A sin(omega_k t) with the first-harmonic balance gain(A) = lam_k / lam."""
    target = scale.lambda_k / lam
    if not 0 < target < 1:
        raise OrbitError("lam must exceed lam_k in modulus with the same sign")
    A = optimize.brentq(lambda A: f.describing_gain(A) - target, 1e-8, 3.8)
    g = Grid(scale.k, N)
    return g, A * np.sin(scale.omega_k * _hist_times(g))


def find_orbit(scale, lam, b, f=None, N=64, tol=1e-11, maxiter=30, guess=None):
    """Odd-symmetric orbit of period p_k by Newton's method on x = G(x).

    The phase is pinned by x(0) = 0, which makes the square system
    overdetermined by one row; it is solved in the least-squares sense.
    """
    f = f or Nonlinearity()
    if guess is None:
        g, v = initial_guess(scale, lam, f, N)
    else:
        g, v = guess.grid, np.array(guess.history, dtype=float)
    D = g.H
    n_it = 0
    for n_it in range(1, maxiter + 1):
        G, J = _half_map(v, g, lam, b, f, tangent=True)
        F = np.append(G - v, v[D])
        A = np.vstack([J - np.eye(D + 1), np.eye(D + 1)[D]])
        dv = np.linalg.lstsq(A, -F, rcond=None)[0]
        v = v + dv
        scale_v = max(1e-300, np.max(np.abs(v)))
        if np.max(np.abs(dv)) <= tol * scale_v:
            break
    else:
        raise OrbitError("Newton iteration for the periodic orbit did not converge")
    amp = float(np.max(np.abs(v)))
    if amp < 1e-8:
        raise OrbitError("shooting collapsed onto the equilibrium")
    G, _ = _half_map(v, g, lam, b, f)
    half_res = float(np.max(np.abs(G - v)))
    hist = HistorySegment(g, v)
    x, _ = _run(hist, lam, b, f, 2 * g.period_steps)
    per = g.period_steps
    seg = x[D:D + per + 1]                       # [0, p]
    shifted = x[D + g.P:D + g.P + per + 1]       # [p/2, 3p/2]
    sym = float(np.max(np.abs(seg + shifted)))
    full = float(np.max(np.abs(x[per:per + D + 1] - v)))
    t = np.arange(per + 1) * g.h
    return PeriodicOrbit(scale.k, lam, b, g, v, t, seg, per * g.h, amp, sym, full,
                         half_res, n_it)


@dataclass
class FloquetReport:
    multipliers: np.ndarray
    trivial_error: float
    unstable_count: int
    trivial_index: int
    tol: float = 1e-6

    @property
    def dominant_nontrivial(self):
        m = np.delete(self.multipliers, self.trivial_index)
        return m[np.argmax(np.abs(m))] if m.size else 0j

    def to_dict(self, top=10):
        ms = self.multipliers[::-1][:top]
        return {"trivial_error": self.trivial_error, "unstable_count": self.unstable_count,
                "multipliers": [{"re": float(z.real), "im": float(z.imag), "abs": float(abs(z))}
                                for z in ms]}


def monodromy(orbit, f=None):
    """Discrete period map of the linearization along the orbit."""
    f = f or Nonlinearity()
    g = orbit.grid
    hist = HistorySegment(g, orbit.history)
    x, Y = _run(hist, orbit.lam, orbit.b, f, g.period_steps, np.eye(g.H + 1))
    per = g.period_steps
    return Y[per:per + g.H + 1]


def multipliers_of(M, tol=1e-6):
    z = np.linalg.eigvals(M)
    z = z[np.argsort(np.abs(z))]
    i = int(np.argmin(np.abs(z - 1)))
    err = float(abs(z[i] - 1))
    others = np.delete(z, i)
    unstable = int(np.sum(np.abs(others) > 1 + tol))
    return FloquetReport(z, err, unstable, i, tol)


def floquet(orbit, f=None, tol=1e-6, refine=True):
    """Floquet multipliers of an orbit; one refinement (N doubled) if the
    trivial multiplier is off by more than 1e-3."""
    f = f or Nonlinearity()
    rep = multipliers_of(monodromy(orbit, f), tol)
    if rep.trivial_error > 1e-3 and refine:
        from .scaling import ProblemScale
        finer = find_orbit(ProblemScale(orbit.k), orbit.lam, orbit.b, f, N=2 * orbit.grid.N)
        rep = multipliers_of(monodromy(finer, f), tol)
    return rep
