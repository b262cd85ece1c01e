"""
Bound states for equal strengths
================================

With delta = 1 the u equation becomes a Razavy equation and the v equation
a Mathieu equation.  The Razavy problem is quasi-exactly solvable: at

    E_n = 8 / hbar^2 (1 - 1/(n+1)^2)

the first n+1 states are elementary functions, labelled by the eigenvalue I
of the second conserved quantity.  Each level then fixes the Mathieu
parameters (a, q) of the v factor.
"""

from fractions import Fraction

import numpy as np

from twocenter_susy import model, spectrum
from twocenter_susy.model import ModelParams
from twocenter_susy.verify import sample_points

p = ModelParams(hbar=1.0, delta=1.0)

# %%
# Levels and labels
# -----------------

print([str(spectrum.qes_energy_exact("razavy_u", n, Fraction(1), Fraction(1))) for n in range(3)])
for e in spectrum.spectrum_table(p):
    if e.sector_sign > 0 and e.parity == "even":
        print(f"n={e.n} m={e.m}  E={e.E:.6f}  I={e.I:+.6f}  M={e.razavy.M:.1f}"
              f"  mathieu a={e.mathieu.a:.6f} q={e.mathieu.q:.6f}")

# %%
# The levels accumulate at the ionization threshold 8/hbar^2.

E = [spectrum.qes_energy("razavy_u", n, p) for n in (1, 5, 20, 50)]
print("approach to threshold:", [f"{x:.5f}" for x in E], "->", 8.0)

# %%
# Checking an assembled state
# ---------------------------
# psi = eta(u) xi(v) is fed through the five-point Hamiltonian stencil.
# Points stay off the centers and off the axis, where the factorized form
# is not smooth.

bs = spectrum.assemble_bound_state(1, 1, +1, "even", params=p)
pts = sample_points(30, np.random.default_rng(0), center_gap=0.25)
psi = bs.spinor(pts)[0]
H = model.apply_hamiltonian(0, bs.field(), pts, p)
print("relative residual of H psi - E psi:", np.abs(H - bs.energy * psi).max() / np.abs(psi).max())
print("normalizable:", bs.normalizable)

# %%
# Its fermionic partner
# ---------------------
# Applying Q+ moves the state into the F=1 doublet with the same energy.

chi = spectrum.fermionic_partner(bs)
H1 = model.apply_hamiltonian(1, chi, pts, p)
c = chi(pts.x1, pts.x2)[1:3]
print("partner residual:", np.abs(H1 - bs.energy * c).max() / np.abs(c).max())
