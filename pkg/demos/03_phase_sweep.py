"""Boundary states of a finite chain as the modulation phase is swept.

A 101-atom open chain with b = sqrt(5)/10 inherits the gaps of the infinite
chain.  As the phase advances, states localized at the two ends cross these
gaps.  In each large gap there are four such branches: two per end, of
opposite circular polarization, and the two at the same end move in the same
direction.  Branches in the upper gap are superradiant, those in the lower
gap subradiant.

Run:  python demos/03_phase_sweep.py [output_dir]   (about twenty seconds)
"""
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomchain import (
    ChainConfig,
    Polarization,
    Thresholds,
    bloch_spectrum,
    branch_slope,
    decay_range_along_branch,
    detect_gaps,
    label_sweep,
    open_chain_sweep,
    track_branches,
)
from atomchain.spectra import phase_grid

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

config = ChainConfig(n_atoms=101, spacing=0.1, zeeman_amp=10.0, flux=math.sqrt(5) / 10)
sweep = open_chain_sweep(config, phase_grid(201))

# gaps come from the infinite chain at the nearest convergent p/q (17/76)
gaps = detect_gaps(bloch_spectrum(config.flux, k_samples=16, phase_samples=8))
lower, upper = gaps.widest(2)
print(f"widest gaps: {lower} and {upper}")

labels = label_sweep(sweep, gaps, Thresholds())
branches = track_branches(sweep, gaps, Thresholds(), labels)

fig, ax = plt.subplots(figsize=(6, 5))
ax.scatter(sweep.phase / (2 * np.pi), sweep.detuning, s=0.3, c="0.85")
for gap in (lower, upper):
    idx = gaps.intervals.index(gap)
    for b in branches:
        if b.gap != idx or b.polarization is Polarization.MIXED or b.in_gap.sum() < 3:
            continue
        lo, hi = decay_range_along_branch(sweep, b)
        print(f"{b.tag} in gap {gap[0]:+.2f}..{gap[1]:+.2f}: slope {branch_slope(sweep, b):+.2f}, "
              f"decay {lo:.2f} to {hi:.2f}")
        ax.plot(np.mod(b.phases, 2 * np.pi) / (2 * np.pi), b.detunings, ".", ms=2, label=b.tag)
    ax.axhspan(*gap, color="C0", alpha=0.05)
ax.set_xlabel("phase / 2 pi")
ax.set_ylabel("detuning")
ax.legend(markerscale=4, fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig(out / "phase_sweep.png", dpi=150)
print(f"figure written to {out}/phase_sweep.png")
