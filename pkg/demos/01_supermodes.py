"""
Supermodes and the exceptional point
====================================

Two coupled cavities, one with gain and one with loss, hybridize into two
supermodes. Their complex frequencies coalesce when the tunneling rate hits
J_EP = (gamma + kappa) / 4. Rates are in units of the passive loss gamma.
"""

import numpy as np

from ptomech import SystemParams, classify, supermodes

# start from the default parameters, with zero detuning to centre the spectrum
base = SystemParams(kappa=0.8, delta=0.0)
print("J_EP for kappa = 0.8:", classify(base).j_ep)

# walk J across the EP and watch the splitting change character:
# below J_EP it is purely in the real part, above it purely in the imaginary part
for J in np.linspace(0.3, 0.6, 7):
    p = base.replace(J=J)
    sm = supermodes(p)
    print(f"J={J:.3f}  w+={sm.omega_plus:.4f}  w-={sm.omega_minus:.4f}  {classify(p).tag.value}")
