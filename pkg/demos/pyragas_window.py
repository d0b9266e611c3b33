"""The stability window of the controlled equilibrium near the k-th Hopf point.

Numerically located ends of the window are compared with their small-eps
series, and the spectrum is checked inside and on both sides.
"""
import math

from delaylab.asymptotics import boundary_expansion, order_fit
from delaylab.scaling import make_scale
from delaylab.spectrum import pyragas_interval

ks = (9, 19, 39, 79)
lo, up = [], []
for k in ks:
    s = make_scale(k)
    iv = pyragas_interval(s)
    ser = boundary_expansion(s)
    lo.append((s.eps, iv.b_lower - ser.b_lower))
    up.append((s.eps, iv.b_upper - ser.b_upper))
    print(f"k={k:3d}  b in ({iv.b_lower:.6e}, {iv.b_upper:.6e})  "
          f"E below/mid/above = {iv.E_below}/{iv.E_mid}/{iv.E_above}")
    print(f"        series ({ser.b_lower:.6e}, {ser.b_upper:.6e})")

# %% the residuals shrink like eps^4
print("fitted order, lower end:", round(order_fit(lo[1:]), 2))
print("fitted order, upper end:", round(order_fit(up[1:]), 2))

# %% the window width is pi^3 eps^3 to leading order
for k in ks:
    s = make_scale(k)
    iv = pyragas_interval(s, verify=False)
    print(f"k={k:3d}  width={iv.b_upper - iv.b_lower:.6e}  pi^3 eps^3={math.pi ** 3 * s.eps ** 3:.6e}")
