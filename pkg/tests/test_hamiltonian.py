import math
from fractions import Fraction

import numpy as np
import pytest

from atomchain.core import ChainConfig
from atomchain.greens import pair_coupling
from atomchain.hamiltonian import (
    build_bloch,
    build_finite,
    continued_fraction_convergents,
    decay_matrix,
    farey_sequence,
    polarization_swap,
    rational_flux,
    zeeman_profile,
)
from oracles import brute_force_hamiltonian, supercell_brute_force


def test_single_atom():
    h = build_finite(ChainConfig(1, zeeman_amp=0.0)).matrix
    np.testing.assert_array_equal(h, np.diag([-0.5j, -0.5j]))


def test_single_atom_zeeman_split():
    cfg = ChainConfig(1, zeeman_amp=10.0, flux=0.25, phase=0.0)
    h = build_finite(cfg).matrix
    b = 10 * math.cos(2 * math.pi * 0.25)
    np.testing.assert_allclose(np.diag(h), [b - 0.5j, -b - 0.5j], atol=1e-15)


def test_two_atoms_matches_brute_force():
    h = build_finite(ChainConfig(2, 0.1, 0.0)).matrix
    ref = brute_force_hamiltonian(2, 0.1)
    np.testing.assert_allclose(h, ref, atol=1e-12)
    c = pair_coupling(0.1)
    assert h[0, 2] == pytest.approx(c.j_same) and h[0, 3] == pytest.approx(c.j_cross)


@pytest.mark.parametrize("n, spacing, amp, flux, phase", [
    (5, 0.1, 10.0, math.sqrt(5) / 10, 0.4),
    (7, 0.23, 3.0, 0.4, 2.0),
])
def test_finite_matches_brute_force(n, spacing, amp, flux, phase):
    h = build_finite(ChainConfig(n, spacing, amp, flux, phase)).matrix
    np.testing.assert_allclose(h, brute_force_hamiltonian(n, spacing, amp, flux, phase), atol=1e-12)


def test_three_atom_zeeman_pattern():
    cfg = ChainConfig(3, 0.1, 10.0, flux=1 / 3, phase=0.0)
    b = zeeman_profile(cfg)
    np.testing.assert_allclose(b, [-5.0, -5.0, 10.0], atol=1e-12)
    diag = np.diag(build_finite(cfg).matrix).real
    np.testing.assert_allclose(diag, [-5, 5, -5, 5, 10, -10], atol=1e-12)


def test_zeeman_profile_flux_zero_and_half():
    assert np.allclose(zeeman_profile(ChainConfig(4, zeeman_amp=2.0, flux=0.0)), 2.0)
    np.testing.assert_allclose(zeeman_profile(ChainConfig(4, zeeman_amp=2.0, flux=0.5)),
                               [-2, 2, -2, 2], atol=1e-12)


def test_complex_symmetric(rng):
    cfg = ChainConfig(20, 0.17, 7.0, 0.31, 1.1)
    h = build_finite(cfg).matrix
    np.testing.assert_allclose(h, h.T, atol=0)
    assert not h.flags.writeable


@pytest.mark.parametrize("spacing", [0.05, 0.1, 0.2])
def test_decay_matrix_is_psd(spacing):
    for n in (2, 10, 50):
        h = build_finite(ChainConfig(n, spacing, 5.0, 0.3, 0.7)).matrix
        gamma = decay_matrix(h)
        np.testing.assert_allclose(gamma, gamma.conj().T, atol=1e-14)
        assert np.linalg.eigvalsh(gamma).min() > -1e-10


def test_phase_shift_by_pi_is_polarization_swap():
    cfg = ChainConfig(12, 0.1, 10.0, math.sqrt(5) / 10, 0.9)
    h = build_finite(cfg).matrix
    h_pi = build_finite(cfg.replace(phase=cfg.phase + math.pi)).matrix
    np.testing.assert_allclose(polarization_swap(h), h_pi, atol=1e-12)


def test_bloch_requires_coprime():
    with pytest.raises(ValueError):
        build_bloch(2, 4, 0.0, 0.0, 0.1, 10.0)
    with pytest.raises(ValueError):
        build_bloch(1, 0, 0.0, 0.0, 0.1, 10.0)


def test_bloch_transpose_symmetry():
    a = build_bloch(2, 5, 0.37, 0.8, 0.1, 10.0).matrix
    b = build_bloch(2, 5, -0.37, 0.8, 0.1, 10.0).matrix
    np.testing.assert_allclose(a, b.T, atol=1e-13)


def test_bloch_decay_matrix_psd():
    for k in np.linspace(-np.pi / 5, np.pi / 5, 9)[1:-1]:
        h = build_bloch(2, 5, k, 0.3, 0.1, 10.0).matrix
        assert np.linalg.eigvalsh(decay_matrix(h)).min() > -1e-10


def test_supercell_phase_shift_is_relabeling():
    p, q, k = 2, 5, 0.21
    e1 = np.sort_complex(np.linalg.eigvals(build_bloch(p, q, k, 0.4, 0.1, 10.0).matrix))
    e2 = np.sort_complex(np.linalg.eigvals(
        build_bloch(p, q, k, 0.4 + 2 * math.pi * p / q, 0.1, 10.0).matrix))
    np.testing.assert_allclose(e1, e2, atol=1e-9)


def test_bloch_matches_real_space_sum():
    h = build_bloch(2, 5, 0.3, 0.2, 0.1, 10.0).matrix
    ref = supercell_brute_force(2, 5, 0.3, 0.2, 0.1, 10.0, n_cells=4000)
    np.testing.assert_allclose(h, ref, atol=1e-3)


def test_bloch_q1_two_band():
    h = build_bloch(0, 1, 1.0, 0.0, 0.1, 0.0).matrix
    assert h.shape == (2, 2)
    # zero field: eigenvalues are -i/2 + f_same +/- f_cross
    assert abs(h[0, 0] - h[1, 1]) < 1e-14


def test_rational_flux():
    assert rational_flux(math.sqrt(5) / 10) == Fraction(17, 76)
    assert rational_flux(0.4) == Fraction(2, 5)
    assert rational_flux(math.sqrt(5) / 10, q_max=10) == Fraction(2, 9)
    convs = continued_fraction_convergents(math.pi, 1000)
    assert convs[:4] == [Fraction(3), Fraction(22, 7), Fraction(333, 106), Fraction(355, 113)]


def test_farey_sequence():
    assert farey_sequence(1) == [Fraction(0), Fraction(1)]
    f5 = farey_sequence(5)
    assert len(f5) == 11 and Fraction(2, 5) in f5
    assert len(farey_sequence(20)) == 129
