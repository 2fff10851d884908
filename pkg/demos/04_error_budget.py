"""
Thermal error budget
====================

Four quick estimates for the baseline chain: beam crosstalk, Rabi-frequency
noise from axial motion, anharmonic motion and second-order Lamb-Dicke terms.
The crosstalk term is also swept over the beam waist.
"""

# %%
import numpy as np

from iongate import crosstalk, full_budget
from iongate.reproduce import build_baseline

base = build_baseline()
budget = full_budget(base.chain, base.axial, base.thermal_z, base.transverse)
print(budget.table())

# %%
# Crosstalk falls off as a Gaussian in spacing over waist.
for waist in np.arange(2e-6, 7e-6, 1e-6):
    print(f"w = {waist * 1e6:.0f} um: P_c = {crosstalk(10e-6, waist):.2e}")
