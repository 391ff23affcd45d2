"""
Which parameter pairs are covered
=================================

Walk a coarse (alpha, beta) lattice, print the regime label of each
point, and look at the curve where the capillary quadratic g vanishes.
"""

import numpy as np

from nskw import classify_thm11, classify_thm12, f_func, g_func
from nskw.experiments import regime_label

# the special point sits in both theorems
print(regime_label(0.0, -2.0, 1.0))

# a text map: rows are beta, columns alpha
alphas = np.arange(-3.0, 3.01, 1.0)
for beta in np.arange(-4.0, 0.01, 0.5):
    row = [regime_label(a, beta, 1.0) for a in alphas]
    print(f"beta={beta:5.1f}  " + "  ".join(f"{r:>11s}" for r in row))

# lambda below 1 keeps the case but loses coverage
v = classify_thm11(1.0, -2.5, 0.5)
print(v.case_label, v.lambda_ok)

# f traces the upper root of g on [-5, -2]
for beta in (-5.0, -4.0, -3.0, -2.0):
    a = f_func(beta)
    print(f"f({beta}) = {a:.6f}   g(f, beta) = {g_func(a, beta):.1e}")

# the line beta = 2 alpha - 3
print(classify_thm12(0.25, -2.5).case_label, classify_thm12(0.3, -2.5).case_label)
