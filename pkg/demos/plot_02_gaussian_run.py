"""
A gaussian bump at the special point
====================================

Run the bundled ``thm11_i`` preset on a coarser grid, then read back the
energy ledger, bounds and temperature floor.
"""

from nskw import load_preset
from nskw.experiments import run_scenario

sc = load_preset("thm11_i").with_overrides(["grid.N=256", "time.t_end=2"])
outcome = run_scenario(sc, "out/thm11_i")
for v in outcome.verdicts:
    print(v.line())

res = outcome.result
print(f"{res.n_steps} steps, {res.n_rejects} rejected")

# entropy plus capillary energy is handed to dissipation
first, last = res.records[0], res.records[-1]
print(f"E(0) = {first.energy:.6f}")
print(f"E(T) + D_cum(T) = {last.energy + last.D_cum:.6f}")

# temperature never reaches the maximum-principle floor
gap = max(r.theta_floor - r.theta_min for r in res.records)
print(f"worst floor gap = {gap:.3e}")

# the manifest, diagnostics.csv and snapshots sit in out/thm11_i;
# ``nskw plot out/thm11_i/diagnostics.csv -o out/plots`` writes gnuplot scripts
