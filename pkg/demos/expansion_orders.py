"""How fast the series for Hopf points and the two-scale curve converge.

Residuals between enumerated values and their truncated series are fitted
against eps (or delta) on a log-log scale.
"""
from delaylab import asymptotics as asy
from delaylab import twoscale as ts
from delaylab.cli import expansion_check_eps

# %% Hopf points B+-_{m,j} against the two-term eps series
for f in expansion_check_eps([19, 39, 79], [1, 2, 3]):
    print(f"m={f['m']} j={f['j']} {f['branch']}  order={f['order']:.2f}  k used={f['ks']}")

# %% the curve near Omega = 0 against the small-delta series
om, bm = [], []
for m in (10, 20, 40):
    d = 1 / (2 * m + 1)
    Bmin = ts.B_min(d)[0]
    om.append((d, ts.Omega_of_omega(d, 0.0) - asy.delta_expand(d, 0.0).Omega))
    bm.append((d, Bmin - asy.b_min_expansion(d)))
    print(f"m={m}  B_min={Bmin:.8e}  -delta^2={asy.b_min_expansion(d):.8e}")
print("Omega(delta, 0) order:", round(asy.order_fit(om), 2))
print("B_min order:", round(asy.order_fit(bm), 2))
