"""One datum on each side of the threshold, evolved and diagnosed.

A small Gaussian (K >= 0) disperses: the localized potential on B(R/4)
decays.  A compactly cut-off concentrated Q (K < 0) shows the localized
virial V_R'' staying below -8(3-b) delta0 m until the gradient has grown.
Takes about a minute.

Run with:  python demos/dichotomy.py
"""

import warnings

import numpy as np

from radial_inls import EvolutionConfig, Params, RadialField, RadialGrid, bundle, classify, evolve, explicit_Q, report
from radial_inls.diagnostics import blowup_certificate
from radial_inls.evolution import scattering_indicator
from radial_inls.groundstate import scale_mass

P = Params(1.2, 0.8, 3.6)
ref = RadialGrid(3000, 30.0)
gs = bundle(P.b, P, ref)

# ---- dispersing side
box = RadialGrid(3000, 60.0, far_field=False)
u0 = box.sample(lambda r: 0.3 * np.exp(-r * r / 16) + 0j)
g_ff = box.with_far_field(True)
print("K+ datum:", classify(u0.on(g_ff), P, bundle(P.b, P, g_ff)).verdict.value)
ts = evolve(u0, P, EvolutionConfig(dt=2e-4, t_max=6.0, record_every=500))
print(f"  outcome {ts.outcome.value}, sup ||grad u||^2 = {ts.gradnorm_sq.max():.4f} < {gs.gradnorm_sq_Q:.4f}")
print(f"  mass drift {ts.max_drift('mass'):.2e}, energy drift {ts.max_drift('energy'):.2e}")
for t, lp in zip(ts.t[::5], ts.localized_pot[::5]):
    print(f"  t={t:5.2f}  localized potential {lp:.3e}")
print("  indicator on [5,6]:", scattering_indicator(ts, (5.0, 6.0)))

# ---- concentrating side
Qs = scale_mass(explicit_Q(P.b, ref), 1.6)
u1 = RadialField(ref.with_far_field(False), 1.85 * Qs.values * np.exp(-((ref.r / 3.75) ** 4)))
c = classify(u1.on(ref), P, gs)
delta0 = 1 - report(u1.on(ref), P).energy / gs.m
print(f"\nK- datum: {c.verdict.value}, E/m = {c.energy / c.m:.4f}, delta0 = {delta0:.4f}")
for factor in (2.0, 25.0):
    cfg = EvolutionConfig(dt=5e-6, t_max=0.2, record_every=400, blowup_grad_factor=factor)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ts = evolve(u1, P, cfg)
    print(f"  growth factor {factor}: {ts.outcome.value} at t={ts.t[-1]:.5f} ({ts.stop_reason})")
    print(f"    ||grad u||^2 grew by {ts.gradnorm_sq[-1] / ts.gradnorm_sq[0]:.2f}")
    if ts.outcome.value == "BLOWUP_DETECTED":
        print("    certificate:", blowup_certificate(ts, P, gs.m, delta0, cfg.virial_R))
