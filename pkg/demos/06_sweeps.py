"""
Parameter sweeps and figure presets
===================================

Presets bundle the parameters of each figure. A sweep runs the whole
pipeline per grid point and writes CSV; unstable points carry no
negativity.
"""

from ptomech import figure_preset, run_sweep
from ptomech.sweep import records_to_csv

spec = figure_preset("fig4")
records = run_sweep(spec)
for rec in records[:8]:
    print(rec.variant, rec.coords, rec.e_n and round(rec.e_n["en_mech_cav1"], 5))

# CSV output is bit-reproducible for any worker count
assert records_to_csv(run_sweep(spec, workers=2), spec) == records_to_csv(records, spec)
