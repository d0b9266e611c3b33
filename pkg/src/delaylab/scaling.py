"""Parameter vocabulary: the Hopf index k, control amplitudes, resonance
indices and the fast/slow frequency representations.

Everything is derived from exact integers (k, m, j) so that resonance tests
do not drift.
"""
from dataclasses import dataclass, field
import math

import numpy as np

PI = math.pi


def parity_sign(k):
    """(-1)^k as an int."""
    return -1 if k % 2 else 1


@dataclass(frozen=True)
class ProblemScale:
    """Hopf index k and the quantities attached to the k-th Hopf point."""
    k: int
    omega_k: float = field(init=False)
    eps: float = field(init=False)
    lambda_k: float = field(init=False)
    p_k: float = field(init=False)

    def __post_init__(self):
        k = int(self.k)
        if k < 0 or k != self.k:
            raise ValueError(f"k must be a nonnegative integer, got {self.k!r}")
        omega = (2 * k + 1) * PI / 2
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "omega_k", omega)
        object.__setattr__(self, "eps", 1.0 / omega)
        object.__setattr__(self, "lambda_k", -parity_sign(k) * omega)
        object.__setattr__(self, "p_k", 4.0 / (2 * k + 1))

    @property
    def parity(self):
        return self.k % 2

    @property
    def sign(self):
        return parity_sign(self.k)


def make_scale(k):
    return ProblemScale(k)


@dataclass(frozen=True)
class ControlAmplitude:
    """Physical control amplitude b and its scaled version B = b/(2 eps)."""
    b: float
    B: float

    @classmethod
    def from_b(cls, b, scale):
        if b == 0 or np.isnan(b):
            raise ValueError("control amplitude b must be nonzero")
        return cls(float(b), float(b) / (2 * scale.eps))

    @classmethod
    def from_B(cls, B, scale):
        if B == 0 or np.isnan(B):
            raise ValueError("scaled control amplitude B must be nonzero")
        return cls(2 * scale.eps * float(B), float(B))

    def __post_init__(self):
        if self.b == 0 or self.B == 0:
            raise ValueError("zero control amplitude is not representable")


def b_to_B(b, scale):
    return ControlAmplitude.from_b(b, scale).B


def B_to_b(B, scale):
    return ControlAmplitude.from_B(B, scale).b


@dataclass(frozen=True)
class ResonanceIndex:
    """Resonance m (slow frequency near 2m+1) and hashing-strip index j."""
    m: int
    j: int = 1

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise ValueError("m must be a nonnegative integer")
        if self.j < 0 or int(self.j) != self.j:
            raise ValueError("j must be a nonnegative integer")

    @property
    def Omega_m(self):
        return 2 * self.m + 1

    @property
    def delta(self):
        return 1.0 / (2 * self.m + 1)

    @property
    def j_m(self):
        return (self.m + 1) // 2

    @property
    def a_mj(self):
        return 2 * self.j - 1 + 0.5 * parity_sign(self.m)

    @property
    def alpha_plus(self):
        return 4 * self.j + parity_sign(self.m) - 3

    @property
    def alpha_minus(self):
        return 4 * self.j + parity_sign(self.m) - 1


def reduce_omega(w):
    """Reduce an angle mod 2pi into [-pi/2, 3pi/2)."""
    r = np.mod(np.asarray(w, dtype=float) + PI / 2, 2 * PI) - PI / 2
    return float(r) if np.ndim(r) == 0 else r


@dataclass(frozen=True)
class FrequencyEntourage:
    omega_tilde: float
    Omega_tilde: float
    m: int
    Omega: float
    omega: float


def entourage_of(mu_imag, scale):
    """Split a fast frequency omega_tilde = Im mu into (m, Omega, omega).

    m is the odd resonance 2m+1 with Omega = eps*omega_tilde - (2m+1) in
    (-1, 0] for m=0 and (-2, 0] for m >= 1.
    """
    if not mu_imag > 0:
        raise ValueError("entourage needs a positive imaginary part")
    Wt = scale.eps * mu_imag
    n = round(Wt)
    if n % 2 == 1 and abs(Wt - n) <= 8 * np.finfo(float).eps * max(1.0, Wt):
        # exact resonance up to rounding in eps*omega_tilde
        m = (n - 1) // 2
        Omega = min(Wt - n, 0.0)
    else:
        # smallest odd integer >= Wt
        m = max(0, int(math.ceil((Wt - 1) / 2)))
        Omega = Wt - (2 * m + 1)
    lo = -1.0 if m == 0 else -2.0
    if not (lo < Omega <= 0):
        raise ValueError(f"slow frequency {Wt} has no admissible resonance")
    if Wt == 2 * round(Wt / 2):
        raise ValueError("slow frequency sits at an even resonance")
    return FrequencyEntourage(float(mu_imag), Wt, m, Omega, reduce_omega(mu_imag))
