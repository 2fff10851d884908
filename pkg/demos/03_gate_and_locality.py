"""
A five-segment gate in a 120-ion chain
======================================

Pick a target pair three sites apart, scan the beat-note detuning and
optimise five equal-length amplitude segments at each point.  Then check that
the optimum hardly changes when only a few ions near the pair are allowed to
move.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from iongate import response_profile, truncated_chain_gate
from iongate.reproduce import PAIR, build_baseline, figure_3a, optimum_gate

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)
base = build_baseline()

# %%
# Detuning scan for two gate lengths.  Points inside the transverse band are
# kept; they are simply poor.
grid = np.linspace(0, 0.03, 151)
tables, summary = figure_3a(base, tau_periods=(100, 500), grid=grid)
scan = np.array(tables["fig3a_detuning_scan.csv"][1])
for tp, best in summary["best"].items():
    print(f"tau = {tp} periods: best dF {best['infidelity']:.2e} at mu_rel {best['mu_rel']:.4f}")

# %%
# The optimum used below.
gate = optimum_gate(base)
print("amplitudes (rad/s):", np.array2string(gate.schedule.amplitudes, precision=3))
print(f"phase {gate.phase:.6f}, dF {gate.infidelity_exact:.3e}")

# %%
# Locality, first via a truncated problem and then via the motion of every ion.
for w in (4, 8, 16):
    _, dist = truncated_chain_gate(PAIR, w, base.mu(9.3e-3), 500 * base.period, 5,
                                   base.transverse, base.thermal_x, base.params, full=gate)
    print(f"{w:2d} free ions: relative L2 distance {dist:.4f}")
prof = response_profile(gate, base.transverse, base.params)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
for col, tp in zip((1, 2), (100, 500)):
    ax1.semilogy(scan[:, 0], scan[:, col], label=f"{tp} periods")
ax1.set(xlabel="(mu - omega_x) / omega_x", ylabel="dF")
ax1.legend()
ax2.semilogy(np.arange(1, 121), prof.normalized, ".-")
ax2.set(xlabel="ion", ylabel="peak shift / target", xlim=(45, 76))
fig.tight_layout()
fig.savefig(OUT / "03_gate_and_locality.png", dpi=120)
print("wrote", OUT / "03_gate_and_locality.png")
