"""
Phonon modes and thermal motion
===============================

Normal modes of the optimised chain along the transverse and axial
directions, the zigzag threshold, and the Doppler-limited axial wobble of each
ion.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from iongate import axial_position_fluctuation, stability_threshold_exact, stability_threshold_uniform
from iongate.reproduce import build_baseline

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)
base = build_baseline()
two_pi = 2 * np.pi

# %%
# The transverse band is very narrow: every mode sits within ~0.2% of omega_x.
fx = base.transverse.frequencies / two_pi
fz = base.axial.frequencies / two_pi
print(f"transverse band: {fx.min() / 1e6:.4f} .. {fx.max() / 1e6:.4f} MHz")
print(f"axial modes: lowest {fz[0] / 1e3:.2f} kHz, highest {fz[-1] / 1e3:.1f} kHz")

# %%
# How soft can the transverse trap go before the chain buckles?  The exact
# value for this chain sits close to the infinite uniform-chain estimate.
exact = stability_threshold_exact(base.chain) / two_pi
uniform = stability_threshold_uniform(10e-6, base.params) / two_pi
print(f"zigzag threshold: exact {exact / 1e3:.1f} kHz, uniform-chain formula {uniform / 1e3:.1f} kHz")

# %%
# Occupations at the Doppler limit and the resulting position spread.
print(f"nbar, lowest axial mode: {base.thermal_z.nbar[0]:.0f}")
print(f"nbar, transverse COM:    {base.thermal_x.nbar[0]:.2f}")
dz = axial_position_fluctuation(base.chain, base.axial, base.thermal_z)
print(f"mean delta z over ions 11..110: {dz[10:110].mean() * 1e6:.3f} um")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.plot(fz / 1e3, ".", ms=3)
ax1.set(xlabel="mode index", ylabel="axial frequency (kHz)")
ax2.plot(np.arange(1, 121), dz * 1e6)
ax2.axvspan(11, 110, color="0.9")
ax2.set(xlabel="ion", ylabel="delta z (um)", ylim=(0, None))
fig.tight_layout()
fig.savefig(OUT / "02_modes_and_thermal.png", dpi=120)
print("wrote", OUT / "02_modes_and_thermal.png")
