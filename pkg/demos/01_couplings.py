"""Pair couplings and their lattice sums.

Two atoms a distance d apart exchange photons through two channels: one that
keeps the circular polarization (j_same) and one that flips it (j_cross).
Their imaginary parts set the collective decay; the real parts shift the
resonance.  Summed over an infinite chain with a Bloch phase kappa per site
they become the band dispersion of the field-free lattice.

Run:  python demos/01_couplings.py [output_dir]
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomchain.greens import Method, bloch_sum, coupling_kernel

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

# near field: the same-polarization decay tends to -1/2 (two atoms on one
# site radiate as a single superradiant dipole), the cross term to 0
d = np.geomspace(1e-3, 3.0, 400)
j_same, j_cross = coupling_kernel(d)
print(f"Im j_same at d = 1e-3: {j_same.imag[0]:.6f}")

fig, ax = plt.subplots(1, 2, figsize=(9, 3.5), sharex=True)
ax[0].plot(d, j_same.imag, label="Im j_same")
ax[0].plot(d, j_cross.imag, label="Im j_cross")
ax[0].set_xscale("log")
ax[0].set_xlabel("d / wavelength")
ax[0].legend()
ax[1].plot(d, np.abs(j_same), label="|j_same|")
ax[1].plot(d, np.abs(j_cross), label="|j_cross|")
ax[1].set_xscale("log")
ax[1].set_yscale("log")
ax[1].set_xlabel("d / wavelength")
ax[1].legend()
fig.tight_layout()
fig.savefig(out / "couplings.png", dpi=120)

# lattice sums at spacing 0.1.  The light line sits at kappa = +/- 2 pi * 0.1,
# where the sums diverge logarithmically; the grid below avoids it.
spacing = 0.1
kappa = np.linspace(-np.pi, np.pi, 401)[:-1] + np.pi / 400
sums = [bloch_sum(k, spacing) for k in kappa]
f_same = np.array([s.f_same for s in sums])
f_cross = np.array([s.f_cross for s in sums])

# the truncated sum is an independent route to the same numbers
for k in (0.0, 1.2, 2.5):
    closed = bloch_sum(k, spacing)
    trunc = bloch_sum(k, spacing, Method.TRUNCATED)
    print(f"kappa = {k:.1f}: |closed - truncated| = {abs(closed.f_same - trunc.f_same):.2e}")

# band decays at zero field: the two eigenvalues of the 2x2 Bloch block
decay_upper = -2 * (f_same + f_cross - 0.5j).imag
decay_lower = -2 * (f_same - f_cross - 0.5j).imag

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(kappa, decay_upper, label="same + cross")
ax.plot(kappa, decay_lower, label="same - cross")
ax.axvline(2 * np.pi * spacing, color="k", lw=0.5, ls=":")
ax.axvline(-2 * np.pi * spacing, color="k", lw=0.5, ls=":")
ax.set_xlabel("kappa (per-site Bloch phase)")
ax.set_ylabel("decay rate")
ax.legend()
fig.tight_layout()
fig.savefig(out / "band_decay_zero_field.png", dpi=120)
print(f"figures written to {out}/")
