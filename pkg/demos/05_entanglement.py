"""
Covariance matrix and logarithmic negativity
============================================

For a stable branch the quadrature fluctuations reach a Gaussian steady
state whose covariance solves a Lyapunov equation. Each pair of modes then
gets a logarithmic negativity. The mechanics entangles with the gain
cavity even though it only couples to the lossy one.
"""

import numpy as np

from ptomech import SystemParams, diffusion_matrix, drift_matrix, pairwise_all, physicality_watchdog, solve_lyapunov
from ptomech import solve_branches

p = SystemParams(kappa=0.1, J=0.8, alpha_in=3e3)
(branch,) = solve_branches(p)
a = drift_matrix(branch, p)
cm = solve_lyapunov(a, diffusion_matrix(p))
np.set_printoptions(precision=4, suppress=True)
print(cm.v)
print("min symplectic eigenvalue:", physicality_watchdog(cm))
for pair, res in pairwise_all(cm).items():
    print(f"{pair.label:10s} E_N = {res.e_n:.5f}")
