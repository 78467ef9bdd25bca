"""
Mean-field steady states and bistability
========================================

The mechanical displacement shifts the lossy-cavity detuning in proportion
to its photon number, so the steady-state photon number solves a cubic.
Inside a bistable window there are three solutions.
"""

import numpy as np

from ptomech import SystemParams, solve_branches
from ptomech.stability import branch_verdicts

# the default blue-detuned point has a single branch
p = SystemParams(kappa=0.1, J=0.8, alpha_in=3e3)
(branch,) = solve_branches(p)
print(f"n2 = {branch.n2:.6g}, G1 = {branch.g1:.4g}, G2 = {branch.g2:.4g}")

# a small detuning below the supermode splitting opens a bistable window
q = SystemParams(kappa=0.1, J=0.8, delta=0.1)
for alpha_in in np.geomspace(5e4, 5e5, 7):
    pts = branch_verdicts(q.replace(alpha_in=alpha_in))
    desc = ", ".join(f"{b.n2:.3g}{'(stable)' if v.stable else ''}" for b, v in pts)
    print(f"alpha_in={alpha_in:9.4g}: {desc}")

# the parametric amplifier breaks the phase symmetry but keeps the branch structure
print(len(solve_branches(q.replace(alpha_in=222496.0, chi=0.01))), "branches with chi = 0.01")
