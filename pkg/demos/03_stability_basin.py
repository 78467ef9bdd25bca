"""
Stability basins
================

A grid of Jacobian stability verdicts over drive strength and tunneling.
The unstable region grows as the gain approaches the loss.
"""

from ptomech import Axis, SystemParams, basin

x = Axis("alpha_in", 1e-6, 1e4, 60, "log")
y = Axis("J", 0.0, 1.5, 60)
for kappa in (0.1, 0.8):
    smap = basin(SystemParams(kappa=kappa), x, y)
    print(f"kappa={kappa}: unstable fraction {smap.unstable_fraction:.3f}")

# the map is plain CSV plus a JSON sidecar carrying the EP line
print(smap.to_csv().splitlines()[:3])
print(smap.metadata()["ep_contour"])
