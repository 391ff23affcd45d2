"""
Convergence against a manufactured solution
===========================================

Force the equations so that a decaying cosine/sine mode is exact, then
halve the mesh twice and fit the order.
"""

from nskw import load_preset
from nskw.experiments import refinement_study

sc = load_preset("mms_standard").with_overrides(["time.t_end=0.5"])
study = refinement_study(sc, [64, 128, 256])
for f, errs in study["errors"].items():
    print(f, " ".join(f"{e:.3e}" for e in errs), f"order={study['orders'][f]:.3f}")

# the heat-only variant freezes v and u and stresses the lambda = 0 flux
heat = refinement_study(load_preset("mms_heat_only").with_overrides(["time.t_end=0.5"]), [64, 128, 256])
print("heat-only theta order", round(heat["orders"]["theta"], 3))
