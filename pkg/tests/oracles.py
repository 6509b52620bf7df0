"""Independent reference implementations used as test oracles.

Nothing here imports the package: the couplings are rebuilt from the
Cartesian dyadic Green's tensor and the Hamiltonians are filled with
explicit loops.
"""
import math

import numpy as np

K0 = 2.0 * math.pi  # wavelength is the unit of length


def green_tensor(r_vec):
    """Free-space dyadic Green's tensor with the sign convention in which the
    coupling is ``(3 pi / k0) * G``.
    """
    r_vec = np.asarray(r_vec, dtype=float)
    r = np.linalg.norm(r_vec)
    u = r_vec / r
    kr = K0 * r
    pref = np.exp(1j * kr) / (4 * math.pi * K0**2 * r**3)
    iso = kr**2 + 1j * kr - 1
    aniso = -(kr**2) - 3j * kr + 3
    # overall minus sign: physical G enters the Hamiltonian as -(3 pi/k0) G
    return -pref * (iso * np.eye(3) + aniso * np.outer(u, u))


def spherical_components(r_vec):
    """``{(alpha, beta): G_alpha_beta}`` for circular transitions about z."""
    g = green_tensor(r_vec)
    e = {+1: -np.array([1, 1j, 0]) / math.sqrt(2), -1: np.array([1, -1j, 0]) / math.sqrt(2)}
    return {(a, b): e[a].conj() @ g @ e[b] for a in (1, -1) for b in (1, -1)}


def brute_force_hamiltonian(n_atoms, spacing, zeeman_amp=0.0, flux=0.0, phase=0.0):
    """Explicit-loop ``2N x 2N`` Hamiltonian; atoms on the y axis, n = 1..N."""
    dim = 2 * n_atoms
    h = np.zeros((dim, dim), dtype=complex)
    index = lambda n, s: 2 * n + (0 if s == 1 else 1)  # noqa: E731
    for n in range(n_atoms):
        shift = zeeman_amp * math.cos(2 * math.pi * flux * (n + 1) + phase)
        for s in (1, -1):
            h[index(n, s), index(n, s)] = s * shift - 0.5j
        for m in range(n_atoms):
            if m == n:
                continue
            comps = spherical_components([0.0, (n - m) * spacing, 0.0])
            for a in (1, -1):
                for b in (1, -1):
                    h[index(n, a), index(m, b)] = 3 * math.pi / K0 * comps[(a, b)]
    return h


def pair_kernel(d):
    """``(j_same, j_cross)`` from the spherical projection of the tensor."""
    comps = spherical_components([0.0, d, 0.0])
    return 3 * math.pi / K0 * comps[(1, 1)], 3 * math.pi / K0 * comps[(1, -1)]


def direct_lattice_sum(kappa, spacing, n_terms):
    """Partial sum over ``0 < |l| <= n_terms`` followed by averaging over the
    last ``n_terms // 2`` partial sums (simple Cesaro tail).
    """
    l = np.arange(1, n_terms + 1)
    x = K0 * l * spacing
    e = np.exp(1j * x) / x**3
    js = -0.375 * e * (x * x - 1j * x + 1)
    jc = 0.375 * e * (x * x + 3j * x - 3)
    c = 2 * np.cos(kappa * l)
    ps = np.cumsum(js * c)
    pc = np.cumsum(jc * c)
    half = n_terms // 2
    return ps[half:].mean(), pc[half:].mean()


def two_band_energies(kappa, spacing, zeeman_amp, phase, f_same, f_cross):
    """Eigenvalues of the 2x2 Bloch problem at zero flux (single-site cell)."""
    shift = zeeman_amp * math.cos(phase)
    m = np.array([[shift - 0.5j + f_same, f_cross], [f_cross, -shift - 0.5j + f_same]])
    return np.linalg.eigvals(m)


def supercell_brute_force(p, q, k, phase, spacing, zeeman_amp, n_cells):
    """Bloch matrix from a direct real-space sum over ``n_cells`` cells each way.

    Converges only slowly; adequate for a loose check at moderate ``n_cells``.
    """
    dim = 2 * q
    h = np.zeros((dim, dim), dtype=complex)
    for n in range(q):
        shift = zeeman_amp * math.cos(2 * math.pi * p * (n + 1) / q + phase)
        h[2 * n, 2 * n] += shift - 0.5j
        h[2 * n + 1, 2 * n + 1] += -shift - 0.5j
    for n in range(q):
        for m in range(q):
            j = np.arange(-n_cells, n_cells + 1) * q + (m - n)
            j = j[j != 0]
            x = K0 * np.abs(j) * spacing
            e = np.exp(1j * x) / x**3
            js = -0.375 * e * (x * x - 1j * x + 1)
            jc = 0.375 * e * (x * x + 3j * x - 3)
            # periodic gauge: phase of the actual displacement j
            w = np.exp(1j * k * j)
            h[2 * n, 2 * m] += np.sum(js * w)
            h[2 * n + 1, 2 * m + 1] += np.sum(js * w)
            h[2 * n, 2 * m + 1] += np.sum(jc * w)
            h[2 * n + 1, 2 * m] += np.sum(jc * w)
    return h
