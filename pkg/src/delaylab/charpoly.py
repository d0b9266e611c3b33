"""Characteristic function of the controlled linearization,

    psi(mu) = -eps*B*mu - (-1)^k * B * exp(-mu) + (1 + exp(-pi*eps*mu))/2,

its partial derivatives, Newton refinement of roots, the real eigenvalue
branch B(mu_R), and the spectrum at vanishing control.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize, special

from .scaling import PI, entourage_of

ROOT_TOL = 1e-12


class RootError(RuntimeError):
    pass


@dataclass
class Eigenvalue:
    mu: complex
    residual: float
    entourage: object = None

    @property
    def re(self):
        return self.mu.real

    @property
    def im(self):
        return self.mu.imag


def _sign(scale, parity):
    par = scale.parity if parity is None else parity % 2
    return -1.0 if par else 1.0


def _check_B(B):
    if B == 0:
        raise ValueError("B = 0 is not allowed")


def eval_psi(mu, scale, B, parity=None, eps=None):
    """psi(mu, eps, B); vectorized in mu. eps defaults to 1/omega_k."""
    _check_B(B)
    e = scale.eps if eps is None else eps
    s = _sign(scale, parity)
    mu = np.asarray(mu, dtype=complex)
    out = -e * B * mu - s * B * np.exp(-mu) + 0.5 * (1 + np.exp(-PI * e * mu))
    return out[()] if out.ndim == 0 else out


def psi_scale(mu, scale, B, eps=None):
    """Magnitude of the individual terms of psi, used to judge residuals."""
    e = scale.eps if eps is None else eps
    mu = np.asarray(mu, dtype=complex)
    return (abs(e * B * mu) + abs(B * np.exp(-mu))
            + 0.5 * (1 + abs(np.exp(-PI * e * mu))))


def psi_derivatives(mu, scale, B, parity=None, eps=None):
    """Partial derivatives (psi_mu, psi_eps, psi_B)."""
    _check_B(B)
    e = scale.eps if eps is None else eps
    s = _sign(scale, parity)
    mu = np.asarray(mu, dtype=complex)
    em = np.exp(-mu)
    ep = np.exp(-PI * e * mu)
    psi_mu = -e * B + s * B * em - 0.5 * PI * e * ep
    psi_eps = -mu * (B + 0.5 * PI * ep)
    psi_B = -e * mu - s * em
    out = (psi_mu, psi_eps, psi_B)
    if mu.ndim == 0:
        return tuple(x[()] for x in out)
    return out


def dmu_dB(mu, scale, B, parity=None):
    """Implicit derivative of a simple root mu(B)."""
    psi_mu, _, psi_B = psi_derivatives(mu, scale, B, parity)
    return -psi_B / psi_mu


def characteristic_residual(mu, scale, B, parity=None):
    """mu - RHS of the characteristic equation written with b = 2 eps B."""
    s = _sign(scale, parity)
    e = scale.eps
    b = 2 * e * B
    return mu + s * np.exp(-mu) / e - (1 + np.exp(-PI * e * mu)) / b


def real_eig_B(mu_R, scale, parity=None):
    """Control B for which the real number mu_R is an eigenvalue."""
    s = _sign(scale, parity)
    e = scale.eps
    den = e * mu_R + s * math.exp(-mu_R)
    if abs(den) < 1e-8 * (1 + abs(e * mu_R)):
        raise ZeroDivisionError(
            f"mu_R={mu_R} is the uncontrolled real eigenvalue; no finite B")
    return 0.5 * (1 + math.exp(-PI * e * mu_R)) / den


def B_max(scale, parity=None):
    """Maximum of the real branch B(mu_R) for even k, and its location."""
    par = scale.parity if parity is None else parity % 2
    if par == 1:
        raise ValueError("B_max is only defined for even k")
    if scale.k == 0:
        # pi*eps = 2 > 1 makes B(mu_R) unbounded as mu_R -> -inf
        raise ValueError("B_max does not exist for k = 0")
    grid = np.linspace(-50, 50, 4001)
    vals = np.array([real_eig_B(x, scale, 0) for x in grid])
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda x: -real_eig_B(x, scale, 0),
                                   bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    return -res.fun, res.x


def newton_root(guess, scale, B, parity=None, tol=ROOT_TOL, maxiter=100):
    """Damped Newton iteration for psi(mu) = 0.

    Convergence is judged on |psi| relative to the size of its terms, which
    is |psi| itself whenever |B| and |mu| are O(1).
    """
    _check_B(B)
    mu = complex(guess)
    f = eval_psi(mu, scale, B, parity)
    for _ in range(maxiter):
        if abs(f) <= tol * max(1.0, psi_scale(mu, scale, B)):
            break
        d = psi_derivatives(mu, scale, B, parity)[0]
        if abs(d) < 1e-14 * max(1.0, psi_scale(mu, scale, B)):
            raise RootError(f"singular Newton step near mu={mu}")
        step = f / d
        t = 1.0
        for _ in range(21):
            trial = mu - t * step
            # far-left trial points overflow exp; the nan/inf fails the test below
            with np.errstate(over="ignore", invalid="ignore"):
                ft = eval_psi(trial, scale, B, parity)
            if abs(ft) < abs(f):
                break
            t *= 0.5
        else:
            # no decrease: accept if already at rounding level
            if abs(f) <= 1e3 * tol * max(1.0, psi_scale(mu, scale, B)):
                break
            raise RootError(f"Newton stalled at mu={mu}, |psi|={abs(f):.3e}")
        mu, f = trial, ft
    else:
        raise RootError(f"Newton did not converge from {guess}")
    if mu.imag < 0:
        mu = mu.conjugate()
    if mu.imag < 1e-9 * max(1.0, abs(mu)):
        # conjugate pair collapsed onto the real axis
        fr = eval_psi(mu.real, scale, B, parity)
        if abs(fr) <= max(abs(f), tol * max(1.0, psi_scale(mu.real, scale, B))):
            mu, f = complex(mu.real, 0.0), fr
    ent =entourage_of(mu.imag, scale) if mu.imag > 0 else None
    return Eigenvalue(mu, float(abs(f)), ent)


def uncontrolled_spectrum(scale, parity=None):
    """Roots of eps*mu + (-1)^k exp(-mu) = 0 with Re mu >= 0, Im mu >= 0.

    These are the eigenvalues at vanishing control B = +-inf: the trivial
    one i*omega_k, floor(k/2) complex ones (one per strip
    omega_k - 2 j pi < Im mu < omega_k - 2 j pi + pi/2), and for odd k one
    positive real root. All are values of the Lambert W function.
    """
    s = _sign(scale, parity)
    e = scale.eps
    z = -s / e                       # mu e^mu = z

    def polish(mu):
        for _ in range(50):
            g = e * mu + s * np.exp(-mu)
            dg = e - s * np.exp(-mu)
            mu = mu - g / dg
            if abs(g) < 1e-15:
                break
        return complex(mu), float(abs(e * mu + s * np.exp(-mu)))

    out = []
    kmax = scale.k // 2 + 2
    seen = []
    for branch in range(-kmax - 1, kmax + 2):
        w = complex(special.lambertw(z, branch))
        if w.real < -1e-10 or w.imag < -1e-10:
            continue
        mu, res = polish(w)
        if any(abs(mu - v) < 1e-8 for v in seen):
            continue
        seen.append(mu)
        if abs(mu.imag) < 1e-12:
            mu = complex(mu.real, 0.0)
        out.append(mu)
    out.sort(key=lambda m: (-m.imag, m.real))
    roots = []
    for mu in out:
        ent = entourage_of(mu.imag, scale) if mu.imag > 0 else None
        r = abs(e * mu + s * np.exp(-mu))
        roots.append(Eigenvalue(mu, float(r), ent))
    return roots
