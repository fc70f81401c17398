"""Ground state Q, the sharp constants built from it, and the sub-threshold split.

Run with:  python demos/ground_state_tour.py
"""

import numpy as np

from radial_inls import Params, RadialGrid, bundle, classify, explicit_Q, report
from radial_inls.groundstate import scale_mass

grid = RadialGrid(3000, 30.0)

# Q decays like 1/r, so it is not square integrable; every quantity below
# uses the power-law far-field closure of the grid.
print("b      ||grad Q||^2     S_b        C*         |K_c(Q)|/G")
for b in (0.25, 0.5, 1.0, 1.5):
    P = Params(1.0, b, 3.0)
    gs = bundle(b, P, grid)
    rep = report(gs.Q, P)
    print(f"{b:<6} {gs.gradnorm_sq_Q:<16.8f} {gs.S_b:<10.6f} {gs.C_star:<10.6f} {abs(rep.K_c) / rep.gradnorm_sq:.2e}")

# at b = 1 the profile is Q = (1 + r/2)^-1
Q1 = explicit_Q(1.0, grid)
print("\nQ(2) at b=1:", np.interp(2.0, grid.r, Q1.values.real))

# threshold and classification in the double-critical regime p = 6 - 2a
P = Params(1.2, 0.8, 3.6)
gs = bundle(P.b, P, grid)
print(f"\nregime {P}: m = {gs.m:.6f}, ||grad Q||^2 = {gs.gradnorm_sq_Q:.6f}")
print("two threshold formulas agree to", abs(gs.m - gs.m_formula_alt) / gs.m)

data = {
    "0.05 Q": 0.05 * gs.Q,
    "0.5 Q": 0.5 * gs.Q,
    "Q": gs.Q,
    "Q_lam, lam=3": scale_mass(gs.Q, 3.0),
    "Gaussian 0.3 e^-r^2/16": grid.sample(lambda r: 0.3 * np.exp(-r * r / 16) + 0j),
}
print(f"\n{'datum':<24}{'verdict':<17}{'E/m':>10}{'K':>12}{'G/G_Q':>9}  consistent")
for name, u in data.items():
    c = classify(u, P, gs)
    ratio = c.gradnorm_sq / c.gradnorm_sq_Q
    print(f"{name:<24}{c.verdict.value:<17}{c.energy / c.m:>10.4f}{c.K:>12.4g}{ratio:>9.4f}  {c.consistent}")
