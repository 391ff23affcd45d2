"""
Long-time decay for nearly isentropic gas
=========================================

With gamma close to 1 the perturbation should settle back to (1, 0, 1).
A short horizon is used here; the preset itself runs to t = 200.
"""

from nskw import load_preset
from nskw.experiments import decay_experiment

sc = load_preset("decay_a").with_overrides(["grid.N=256", "time.t_end=40", "time.record_every=1"])
verdict, outcome = decay_experiment(sc, with_outcome=True)

for r in outcome.result.records[::5]:
    print(f"t={r.t:6.1f}  sup|(v-1, u, theta-1)| = {r.decay_sup:.4f}")

# at t = 40 the envelope is still above the x10 target; the preset horizon reaches it
print(verdict.line())
print("theta stayed in", verdict.context["theta_window"], "range", verdict.context["theta_range"])
print("initial norms", verdict.context["initial_norms"])

# outside cases (a)/(b) the experiment refuses to run
try:
    decay_experiment(sc.with_overrides(["params.alpha=0.5"]))
except ValueError as exc:
    print("refused:", exc)
