"""
Ground states of the Coulomb superpotential
===========================================

Two fixed centers sit at (+1, 0) and (-1, 0) with strengths 1 and delta.
The simplest superpotential solves a Poisson equation with the two
Coulomb terms as its source, and its zero modes come in closed form:

* a bosonic one, exp(-2 (r1 + delta r2) / hbar^2), in the F=0 sector
* a fermionic one in the F=1 doublet, which carries an extra
  1/sqrt(u^2 - v^2) in elliptic coordinates

Both norms are Bessel-function expressions.  This script evaluates them
over several decades of hbar and checks them against direct quadrature.
"""

import numpy as np

from twocenter_susy import groundstates as gs
from twocenter_susy.model import ModelParams

# %%
# Norms against hbar
# ------------------
# For small hbar the states collapse onto the centers and the norms
# underflow double precision, so they are carried as logarithms.

print(f"{'hbar':>6} {'log10 N_bos':>12} {'log10 N_ferm':>13}")
for hbar in (0.2, 0.4, 1.0, 2.0, 4.0, 10.0):
    p = ModelParams(hbar=hbar, delta=0.5)
    lb = gs.log_norm_bosonic_I(p) / np.log(10)
    lf = gs.log_norm_fermionic_I(p) / np.log(10)
    print(f"{hbar:6.1f} {lb:12.4f} {lf:13.4f}")

# %%
# Closed form versus quadrature
# -----------------------------
# The quadrature works in (mu, theta) with u = cosh(mu), v = cos(theta) and
# knows nothing of the Bessel formulas.

for delta in (0.5, 1.0):
    p = ModelParams(hbar=1.0, delta=delta)
    for state in (gs.bosonic_zero_mode_I(p), gs.fermionic_zero_mode_I(p)):
        exact = state.norm().value
        quad = gs.norm_quadrature(state).value
        print(f"delta={delta} {state.kind:12s} closed form {exact:.10e}  quadrature {quad:.10e}")

# %%
# A density slice
# ---------------
# Along the axis the bosonic density peaks at the stronger center (x1 = +1)
# and has a cusp at each center.

p = ModelParams(hbar=1.0, delta=0.5)
grid = gs.Grid(-3, 3, -0.5, 0.5, 13, 3)
dens = gs.density_grid(gs.bosonic_zero_mode_I(p), grid, normalize=True)
for x, val in zip(grid.x1, dens.values[1]):
    bar = "" if np.isnan(val) else "#" * int(60 * val / np.nanmax(dens.values))
    print(f"x1={x:+.1f}  {'(center)' if np.isnan(val) else f'{val:.4f}'}  {bar}")
