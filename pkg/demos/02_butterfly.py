"""Butterfly spectrum of the magnetically modulated chain.

For a rational modulation frequency b = p/q the field repeats every q atoms,
so the infinite chain is a q-site supercell with a Bloch phase.  Collecting
the supercell spectrum over the Bloch phase and over the modulation phase,
for every fraction up to a given denominator, traces out a fractal band
structure.  Colour shows the decay rate of each state: the bands contain
both super- (decay > 1) and subradiant (decay < 1) states.

Run:  python demos/02_butterfly.py [output_dir]   (about half a minute)
"""
import sys
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomchain import butterfly_sweep, detect_gaps, farey_sequence

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

fluxes = farey_sequence(20)
spec = butterfly_sweep(fluxes, k_samples=32, phase_samples=16, spacing=0.1, zeeman_amp=10.0)
print(f"{len(spec)} eigenvalues over {len(fluxes)} fluxes")
print(f"decay range: [{spec.decay.min():.3g}, {spec.decay.max():.3g}]")

# gaps at one flux, e.g. b = 2/5
gaps = detect_gaps(spec.at_flux(Fraction(2, 5)))
for lo, hi in gaps.intervals:
    print(f"b = 2/5 gap: ({lo:7.3f}, {hi:7.3f})  width {hi - lo:.3f}")

# decimate for plotting; the full set is millions of points
step = max(1, len(spec) // 400_000)
order = np.argsort(spec.decay[::step])
fig, ax = plt.subplots(figsize=(6, 5))
sc = ax.scatter(
    spec.sweep_coord[::step][order], spec.detuning[::step][order],
    c=spec.decay[::step][order], s=0.2, cmap="viridis", vmin=0, vmax=4,
)
fig.colorbar(sc, label="decay rate")
ax.set_xlabel("b")
ax.set_ylabel("detuning")
ax.set_ylim(-25, 25)
fig.tight_layout()
fig.savefig(out / "butterfly.png", dpi=150)
print(f"figure written to {out}/butterfly.png")
