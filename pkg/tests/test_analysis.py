import math
from collections import Counter

import numpy as np
import pytest

from atomchain.analysis import (
    EXPECTED_BOUNDARY_LABELS,
    Branch,
    Polarization,
    Radiance,
    Side,
    Thresholds,
    branch_slope,
    classify_mode,
    decay_range_along_branch,
    intensity_profile,
    label_sweep,
    track_branches,
)
from atomchain.core import ChainConfig, CollectiveMode, ComplexEigenvalue
from atomchain.spectra import GapSet, SpectrumSet, open_chain_sweep, phase_grid

GAPS = GapSet(((-1.0, 1.0),), ((-5.0, -1.0), (1.0, 5.0)), 0.1)


def make_mode(amplitudes, detuning=0.0, decay=0.5):
    v = np.asarray(amplitudes, dtype=complex)
    return CollectiveMode(ComplexEigenvalue(detuning, decay), v / np.linalg.norm(v))


def test_uniform_mode_is_bulk():
    lab = classify_mode(make_mode(np.ones(2 * 101)), GAPS)
    assert lab.side is Side.BULK
    assert lab.polarization is Polarization.MIXED
    assert lab.edge_weight == pytest.approx(10 / 101)
    assert lab.in_gap


def test_single_site_profile():
    v = np.zeros(2 * 40)
    v[1] = 1.0  # minus component of the first atom
    mode = make_mode(v, detuning=3.0, decay=1.7)
    prof = intensity_profile(mode)
    assert prof.minus[0] == 1.0 and prof.plus.sum() == 0.0
    lab = classify_mode(mode, GAPS)
    assert (lab.side, lab.polarization, lab.radiance) == (Side.LEFT, Polarization.MINUS,
                                                          Radiance.SUPERRADIANT)
    assert lab.edge_weight == 1.0 and lab.tag == "L-"
    assert not lab.in_gap


def test_right_plus_subradiant():
    v = np.zeros(2 * 40)
    v[-2] = 1.0
    lab = classify_mode(make_mode(v, decay=0.2), GAPS)
    assert lab.tag == "R+" and lab.radiance is Radiance.SUBRADIANT


def test_two_ended_mode_is_ambiguous():
    v = np.zeros(2 * 40)
    v[0] = v[-1] = 1.0
    with pytest.warns(RuntimeWarning):
        lab = classify_mode(make_mode(v), GAPS, Thresholds(edge_threshold=0.4))
    assert lab.ambiguous and lab.side is Side.BULK


def test_window_too_large():
    with pytest.raises(ValueError):
        classify_mode(make_mode(np.ones(2 * 5)), GAPS, Thresholds(window=3))


def test_labels_swap_polarization_under_phase_shift_by_pi(ref_config, ref_gaps):
    sweep = open_chain_sweep(ref_config, [0.9, 0.9 + math.pi])
    a, b = label_sweep(sweep, ref_gaps)
    key = lambda lab, swap: (lab.side, lab.polarization.swapped() if swap else lab.polarization,  # noqa: E731
                             lab.radiance, lab.in_gap)
    assert Counter(key(x, True) for x in a) == Counter(key(x, False) for x in b)


def flat_sweep():
    # no field: the spectrum does not depend on the phase
    return open_chain_sweep(ChainConfig(20, 0.1, 0.0), phase_grid(6))


def manual_branch(sweep, mode_index, nodes=None):
    nodes = nodes or tuple((i, mode_index) for i in range(len(sweep.results)))
    ph = np.array([sweep.phase_grid[i] for i, _ in nodes])
    det = np.array([sweep.results[i].modes[j].detuning for i, j in nodes])
    dec = np.array([sweep.results[i].modes[j].decay for i, j in nodes])
    return Branch(0, Side.LEFT, Polarization.PLUS, 0, nodes, ph, det, dec,
                  np.ones(len(nodes), bool), 1.0)


def test_flat_branch_has_zero_slope():
    sweep = flat_sweep()
    br = manual_branch(sweep, 5)
    assert branch_slope(sweep, br) == pytest.approx(0.0, abs=1e-9)
    lo, hi = decay_range_along_branch(sweep, br)
    assert hi - lo < 1e-9


def test_single_point_branch():
    sweep = flat_sweep()
    br = manual_branch(sweep, 3, nodes=((2, 3),))
    d = sweep.results[2].modes[3].decay
    assert decay_range_along_branch(sweep, br) == (d, d)
    with pytest.raises(ValueError):
        branch_slope(sweep, br)


def test_jump_beyond_tolerance_is_an_error():
    sweep = flat_sweep()
    br = manual_branch(sweep, 0, nodes=((0, 0), (1, 39), (2, 39)))
    from atomchain.analysis import BranchError
    with pytest.raises(BranchError):
        branch_slope(sweep, br)


def test_branches_cover_both_large_gaps(ref_branches, large_gaps, ref_gaps):
    long = [b for b in ref_branches if len(b) >= 20]
    gaps_hit = {ref_gaps.intervals[b.gap] for b in long}
    assert set(large_gaps) <= gaps_hit
    for b in long:
        assert b.side in (Side.LEFT, Side.RIGHT)
        assert np.all(np.abs(np.diff(b.detunings)) <= b.jump_tol)


def test_tracking_is_direction_independent(ref_sweep, ref_gaps, ref_labels):
    fwd = track_branches(ref_sweep, ref_gaps, Thresholds(), ref_labels)
    n = len(ref_sweep.results)
    rev = SpectrumSet(
        ref_sweep.sweep_kind, ref_sweep.origin, ref_sweep.sweep_coord,
        ref_sweep.detuning, ref_sweep.decay, ref_sweep.k, ref_sweep.phase,
        ref_sweep.sample, results=ref_sweep.results[::-1],
        phase_grid=ref_sweep.phase_grid[::-1], config=ref_sweep.config,
    )
    bwd = track_branches(rev, ref_gaps, Thresholds(), ref_labels[::-1])
    as_sets = lambda branches, flip: {  # noqa: E731
        frozenset((n - 1 - i if flip else i, j) for i, j in b.nodes) for b in branches
    }
    assert as_sets(fwd, False) == as_sets(bwd, True)
    slopes_f = sorted(round(branch_slope(ref_sweep, b), 6) for b in fwd if len(b) >= 3)
    slopes_b = sorted(round(branch_slope(rev, b), 6) for b in bwd if len(b) >= 3)
    assert slopes_f == slopes_b


def test_reference_branch_labels(ref_sweep, ref_branches, large_gaps, ref_gaps):
    found = Counter()
    for b in ref_branches:
        gap = ref_gaps.intervals[b.gap]
        if gap not in large_gaps or b.polarization is Polarization.MIXED:
            continue
        where = "lower" if gap == large_gaps[0] else "upper"
        lo, hi = decay_range_along_branch(ref_sweep, b)
        radiance = Radiance.SUPERRADIANT if lo > 1.0 else Radiance.SUBRADIANT
        assert hi <= 1.0 or lo > 1.0
        found[(where, b.tag, radiance)] += 1
    assert found == Counter(EXPECTED_BOUNDARY_LABELS.values())
