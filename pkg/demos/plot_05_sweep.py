"""
Sweeping beta through the five cases
====================================

Pair each beta with an alpha inside its case and run all points; the
table is sorted by parameters so it does not depend on worker count.
"""

from nskw import load_preset
from nskw.experiments import sweep, write_sweep_csv

base = load_preset("constant").with_overrides(
    ["grid.N=128", "time.t_end=1", "initial.amplitudes.v=0.2", "initial.amplitudes.theta=0.2"]
)
rows = sweep(
    base,
    {"alpha": [-2.0, -1.5, 0.0, 0.25, 3.0], "beta": [-1.4, -1.6, -2.2, -2.5, -3.5]},
    paired=True,
)
for r in rows:
    print(f"alpha={r['alpha']:5.2f} beta={r['beta']:5.2f} {r['regime']:>11s} v in [{r['v_min']:.3f}, {r['v_max']:.3f}]")

write_sweep_csv("sweep.csv", rows)
