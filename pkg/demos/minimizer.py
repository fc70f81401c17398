"""Minimize E on the Pohozaev manifold in the double-critical case p = 6 - 2a.

Run with:  python demos/minimizer.py
"""

import numpy as np

from radial_inls import Params, RadialGrid, bundle
from radial_inls.functionals import far_slope
from radial_inls.groundstate import minimize_double_critical

P = Params(1.0, 0.5, 4.0)
grid = RadialGrid(3000, 30.0)
res = minimize_double_critical(P, grid)
gs = bundle(P.b, P, grid)
qb = 6 - 2 * P.b
floor = (0.5 - 1 / qb) * gs.S_b ** (qb / (2 - P.b))

phi = res.phi.values.real
k = int(np.argmax(phi))
print(f"{res.message} after {res.iterations} iterations, converged={res.converged}")
print(f"E(phi) = {res.energy:.6f}  (lower bound {floor:.6f})")
print(f"K(phi)/||grad phi||^2 = {res.K_residual / res.gradnorm_sq:.2e}")
print(f"far-field decay exponent {far_slope(res.phi):.4f}")
# with b < a the |x|^-a term dominates near 0, so phi first rises
print(f"phi(0+) = {phi[0]:.5f}, max phi = {phi[k]:.5f} at r = {grid.r[k]:.3f}")
for r in (0.5, 1, 2, 5, 10, 20, 30):
    print(f"  r={r:5.1f}  phi={np.interp(r, grid.r, phi):.6f}")
