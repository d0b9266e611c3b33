"""Unstable dimension of the trivial equilibrium as the control amplitude varies.

Counts roots of the scaled characteristic function in the right half plane
by the argument principle, and checks the count against the parity table
and against the uncontrolled spectrum.
"""
import numpy as np

from delaylab.charpoly import B_max, uncontrolled_spectrum
from delaylab.scaling import make_scale
from delaylab.spectrum import count_unstable, parity_rule

k = 3
s = make_scale(k)
print(f"k={k}  eps={s.eps:.6f}  lambda_k={s.lambda_k:.6f}  p_k={s.p_k:.6f}")

# %% without control the unstable eigenvalues are known
print("uncontrolled spectrum:", uncontrolled_spectrum(s))

# %% E(B) over both signs of B, staying off B = +-1 where mu = 0 is a root
half = np.geomspace(1e-2, 1e2, 9) * 1.0137
for B in np.concatenate([-half[::-1], half]):
    rep = count_unstable(s, float(B))
    ok = rep.E % 2 == parity_rule(k, B)
    top = max((r.mu.real for r in rep.roots), default=float("nan"))
    print(f"B={B:+10.4f}  E={rep.E}  winding residual={rep.winding_residual:.1e}  "
          f"max Re mu={top:+.4f}  parity ok={ok}")

# %% for large |B| the count settles at k
print("E at B=+-1e8:", [count_unstable(s, sgn * 1e8, with_roots=False).E for sgn in (1, -1)])

# %% for even k, B_max bounds the B > 0 values with a real positive root
print("B_max at k=4:", B_max(make_scale(4)))
