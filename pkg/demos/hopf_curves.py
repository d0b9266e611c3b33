"""Hopf points from the two-scale curves and the hashing lines.

For small eps the imaginary roots of the characteristic function sit where
the eps-independent curves (Omega, omega) meet the lines
Omega = eps (omega + phase - 2 pi j).  Each intersection gives a control
value B where a pair crosses the imaginary axis.
"""
import numpy as np

from delaylab import twoscale as ts
from delaylab.hashing import hopf_points, psi_residual
from delaylab.scaling import make_scale
from delaylab.spectrum import count_unstable, instability_intervals

# %% the curve for the resonance m = 2 (delta = 1/5)
d = 1 / 5
rows = ts.sample_curve(d, n=7)
print("delta  Omega  omega+  omega-  B+  B-  discriminant")
for r in rows:
    print("  ".join(f"{v:+.5f}" for v in r))
print("B_min on the curve:", ts.B_min(d))

# %% Hopf points at k = 10
s = make_scale(10)
for m in range(4):
    for p in hopf_points(s, m):
        print(f"m={p.m} j={p.j} {p.branch}  B={p.B:+.6e}  omega~={p.omega_tilde:9.4f}  "
              f"sign={p.crossing_sign:+d}  |psi|={psi_residual(p, s):.1e}")

# %% each crossing changes E by two
for p in hopf_points(s, 1):
    lo, hi = (count_unstable(s, p.B * f, with_roots=False).E for f in (1.001, 0.999))
    print(f"across B{p.branch}[1,{p.j}]: E {lo} -> {hi}")

# %% instability intervals and whether consecutive ones leave a gap
for iv in instability_intervals(s, 3):
    print(iv)
