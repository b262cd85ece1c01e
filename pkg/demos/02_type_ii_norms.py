"""
Hamilton-Jacobi superpotentials
===============================

A second family of superpotentials solves the zero-energy Hamilton-Jacobi
equation, W = F_a(u) + G_b(v), with elliptic-integral primitives.  The sign
bits a and b select the variant (IIa: a = b = 1, IIb: a = 1, b = 0).  Only one
member of each bosonic and fermionic pair is normalizable, and which one
depends on a.

The norm integrand separates in (mu, theta), so each norm is a short sum of
products of 1D log-domain integrals.
"""

from twocenter_susy import groundstates as gs
from twocenter_susy.errors import DivergenceError
from twocenter_susy.model import ModelParams

# %%
# Which zero modes are normalizable
# ---------------------------------

for a, b, wtype in ((1, 1, "IIa"), (1, 0, "IIb"), (0, 1, "IIb")):
    p = ModelParams(hbar=2.0, delta=0.5, wtype=wtype, kappa=3.0, a=a, b=b)
    print(f"{wtype} a={a} b={b}: normalizable {gs.normalizable_kinds_II(p)}")

# %%
# Norms over hbar
# ---------------
# At small hbar the values span more than twenty decades; the log10 column is
# what the library computes, the linear column is derived from it.

for wtype, b in (("IIa", 1), ("IIb", 0)):
    for kind in ("bosonic_II_sector0", "fermionic_II_comp2"):
        for hbar in (0.2, 2.0, 4.0, 10.0):
            p = ModelParams(hbar=hbar, delta=0.5, wtype=wtype, kappa=3.0, a=1, b=b)
            r = gs.norm_II(kind, p)
            print(f"{wtype} {kind:20s} hbar={hbar:4.1f}  log10 N = {r.log10_magnitude:9.5f}"
                  f"  N = {r.value:.6g}  (rel. err. {r.relative_error:.1e})")

# %%
# The partner that does not normalize
# -----------------------------------

p = ModelParams(hbar=2.0, delta=0.5, wtype="IIa", kappa=3.0, a=1, b=1)
try:
    gs.norm_II("bosonic_II_sector2", p)
except DivergenceError as exc:
    print("sector-2 mode:", exc)
