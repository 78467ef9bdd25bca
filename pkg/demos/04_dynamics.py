"""
Time evolution as a check on linear stability
=============================================

Start next to a steady state and integrate the noise-free mean-field
equations. A stable branch attracts the trajectory; an unstable one lets
the intensities grow at twice the largest eigenvalue real part.
"""

from ptomech import SystemParams, classify_trajectory, integrate
from ptomech.stability import branch_verdicts

stable_pt = SystemParams(kappa=0.8, J=0.8, alpha_in=1e2)
((branch, verdict),) = branch_verdicts(stable_pt)
traj = integrate(stable_pt, 1.01 * branch.state)
print(verdict.stable, classify_trajectory(traj).kind)

unstable_pt = SystemParams(kappa=0.8, J=0.42, alpha_in=1e-5)
((branch, verdict),) = branch_verdicts(unstable_pt)
# keep the horizon short so the fit sees the linear growth phase only
traj = integrate(unstable_pt, branch.state * (1 + 1e-6), t_end=250.0)
cls = classify_trajectory(traj, window=0.3)
print(cls.kind, "fitted rate", cls.rate, "expected", 2 * verdict.max_re_lambda)
