"""Effective non-Hermitian Hamiltonians of the modulated chain.

Basis ordering is interleaved per atom, ``(+_1, -_1, +_2, -_2, ...)``.  The
global transition frequency is dropped, so diagonal entries are
``+/- B_n - i/2`` with the Zeeman shift ``B_n = zeeman_amp * cos(2 pi b n + phi)``
and atoms numbered ``n = 1 .. N`` (``1 .. q`` inside a magnetic supercell).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import ChainConfig, reduce_phase
from .greens import EPS_LIGHT, coupling_kernel, supercell_couplings

#: largest supercell used when approximating an irrational flux
Q_MAX = 100


@dataclass(frozen=True, eq=False)
class FiniteHamiltonian:
    matrix: np.ndarray
    config: ChainConfig


@dataclass(frozen=True, eq=False)
class BlochHamiltonian:
    matrix: np.ndarray
    p_over_q: Fraction
    k: float
    phase: float


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def zeeman_profile(config: ChainConfig) -> np.ndarray:
    """Zeeman shifts ``mu B_n`` for atoms ``n = 1 .. N``."""
    n = np.arange(1, config.n_atoms + 1)
    return config.zeeman_amp * np.cos(2.0 * np.pi * config.flux * n + config.phase)


def _fill_diagonal(matrix, shifts):
    idx = np.arange(shifts.size)
    matrix[2 * idx, 2 * idx] += shifts - 0.5j
    matrix[2 * idx + 1, 2 * idx + 1] += -shifts - 0.5j


def build_finite(config: ChainConfig) -> FiniteHamiltonian:
    """Open-boundary ``2N x 2N`` Hamiltonian of a finite chain.

    The matrix is complex symmetric by construction: every off-diagonal block
    depends on ``|n - m|`` only and the cross coupling is the same for
    ``(+, -)`` and ``(-, +)``.
    """
    n = config.n_atoms
    matrix = np.zeros((2 * n, 2 * n), dtype=complex)
    if n > 1:
        j_same, j_cross = coupling_kernel(np.arange(1, n) * config.spacing)
        j_same = np.concatenate([[0.0], j_same])
        j_cross = np.concatenate([[0.0], j_cross])
        sites = np.arange(n)
        sep = np.abs(sites[:, None] - sites[None, :])
        matrix[0::2, 0::2] = j_same[sep]
        matrix[1::2, 1::2] = j_same[sep]
        matrix[0::2, 1::2] = j_cross[sep]
        matrix[1::2, 0::2] = j_cross[sep]
    _fill_diagonal(matrix, zeeman_profile(config))
    return FiniteHamiltonian(_readonly(matrix), config)


def build_bloch(
    p: int,
    q: int,
    k: float,
    phase: float,
    spacing: float,
    zeeman_amp: float,
    eps_light: float = EPS_LIGHT,
) -> BlochHamiltonian:
    """Magnetic-supercell Bloch Hamiltonian for rational flux ``p/q``.

    ``k`` is the Bloch phase per site; the reduced zone is ``|k| <= pi/q``.
    The periodic gauge is used, so the ``(n, m)`` block is built from the
    residue-class coupling ``g((m - n) mod q)`` and ``H(-k) == H(k).T``.

    Raises
    ------
    LightLineSingular
        If any of the ``q`` folded momenta lies on the light line.
    """
    p, q = int(p), int(q)
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need q >= 1 and gcd(p, q) = 1, got {p}/{q}")
    g_same, g_cross = supercell_couplings(q, float(k), spacing, eps_light)
    sites = np.arange(q)
    offset = (sites[None, :] - sites[:, None]) % q
    matrix = np.zeros((2 * q, 2 * q), dtype=complex)
    matrix[0::2, 0::2] = g_same[offset]
    matrix[1::2, 1::2] = g_same[offset]
    matrix[0::2, 1::2] = g_cross[offset]
    matrix[1::2, 0::2] = g_cross[offset]
    phase = reduce_phase(phase)
    shifts = zeeman_amp * np.cos(2.0 * np.pi * p * (sites + 1) / q + phase)
    _fill_diagonal(matrix, shifts)
    return BlochHamiltonian(_readonly(matrix), Fraction(p, q), float(k), phase)


def bloch_stack(p, q, k, phases, spacing, zeeman_amp, eps_light=EPS_LIGHT) -> np.ndarray:
    """Bloch Hamiltonians at one ``k`` for several phases, shape ``(P, 2q, 2q)``.

    The couplings do not depend on the phase, so they are evaluated once.
    """
    base = build_bloch(p, q, k, 0.0, spacing, 0.0, eps_light).matrix
    phases = np.asarray(phases, dtype=float)
    stack = np.repeat(base[None], phases.size, axis=0)
    sites = np.arange(1, q + 1)
    shifts = zeeman_amp * np.cos(2.0 * np.pi * p * sites[None, :] / q + phases[:, None])
    idx = np.arange(q)
    stack[:, 2 * idx, 2 * idx] += shifts
    stack[:, 2 * idx + 1, 2 * idx + 1] -= shifts
    return stack


def decay_matrix(matrix: np.ndarray) -> np.ndarray:
    """``Gamma = i (H - H^dagger)``; positive semidefinite for physical chains."""
    matrix = np.asarray(matrix)
    return 1j * (matrix - matrix.conj().T)


def polarization_swap(matrix: np.ndarray) -> np.ndarray:
    """Conjugate by the permutation exchanging ``+`` and ``-`` on every atom."""
    perm = np.arange(matrix.shape[0]).reshape(-1, 2)[:, ::-1].ravel()
    return np.asarray(matrix)[np.ix_(perm, perm)]


def continued_fraction_convergents(x: float, q_max: int = Q_MAX, tol: float = 1e-12):
    """Convergents ``p/q`` of ``x`` with ``q <= q_max``, in order."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("flux must be finite")
    out = []
    h_prev, h = 1, math.floor(x)
    k_prev, k = 0, 1
    rest = x - math.floor(x)
    out.append(Fraction(h, k))
    while abs(x - h / k) > tol and rest > 0:
        a = 1.0 / rest
        ai = math.floor(a)
        rest = a - ai
        h_prev, h = h, ai * h + h_prev
        k_prev, k = k, ai * k + k_prev
        if k > q_max:
            break
        out.append(Fraction(h, k))
    return out


def rational_flux(b: float, q_max: int = Q_MAX) -> Fraction:
    """Best continued-fraction convergent of ``b`` with denominator ``<= q_max``."""
    return continued_fraction_convergents(b, q_max)[-1]


def farey_sequence(order: int) -> list[Fraction]:
    """All reduced fractions in ``[0, 1]`` with denominator ``<= order``."""
    if order < 1:
        raise ValueError("Farey order must be >= 1")
    fracs = {Fraction(p, q) for q in range(1, order + 1) for p in range(0, q + 1)}
    return sorted(fracs)
