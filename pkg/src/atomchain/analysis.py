"""Boundary-state classification, intensity profiles and branch tracking
for open-chain phase sweeps.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .core import CollectiveMode
from .polylog import wrap_angle
from .spectra import BAND_EDGE_TOL, GapSet, SpectrumSet


class Side(enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"
    BULK = "Bulk"


class Polarization(enum.Enum):
    PLUS = "Plus"
    MINUS = "Minus"
    MIXED = "Mixed"

    def swapped(self) -> "Polarization":
        return {Polarization.PLUS: Polarization.MINUS,
                Polarization.MINUS: Polarization.PLUS}.get(self, self)


class Radiance(enum.Enum):
    SUPERRADIANT = "Superradiant"
    SUBRADIANT = "Subradiant"


class BranchError(ValueError):
    """A tracked branch jumps by more than the continuation tolerance."""


@dataclass(frozen=True)
class Thresholds:
    window: int = 10
    edge_threshold: float = 0.5
    pol_threshold: float = 0.7
    band_edge_tol: float = BAND_EDGE_TOL
    # modes this close to a band edge may hybridise with the bulk
    band_edge_exclusion: float = 0.2
    jump_factor: float = 5.0


@dataclass(frozen=True)
class ModeLabel:
    side: Side
    polarization: Polarization
    radiance: Radiance
    edge_weight: float
    pol_fraction: float
    in_gap: bool
    left_weight: float = 0.0
    right_weight: float = 0.0
    ambiguous: bool = False

    @property
    def tag(self) -> str:
        """Short name such as ``L+`` or ``R-``; ``bulk`` for bulk modes."""
        if self.side is Side.BULK:
            return "bulk"
        sign = {Polarization.PLUS: "+", Polarization.MINUS: "-"}.get(self.polarization, "~")
        return self.side.value[0] + sign


@dataclass(frozen=True, eq=False)
class IntensityProfile:
    plus: np.ndarray
    minus: np.ndarray


#: the eight boundary-state branches of the reference chain
#: (N = 101, spacing 0.1, zeeman_amp 10, b = sqrt(5)/10) in its two widest
#: gaps: name -> (gap, tag, radiance)
EXPECTED_BOUNDARY_LABELS = {
    "A1": ("upper", "R-", Radiance.SUPERRADIANT),
    "A2": ("upper", "L-", Radiance.SUPERRADIANT),
    "A3": ("upper", "R+", Radiance.SUPERRADIANT),
    "A4": ("upper", "L+", Radiance.SUPERRADIANT),
    "B1": ("lower", "R+", Radiance.SUBRADIANT),
    "B2": ("lower", "L+", Radiance.SUBRADIANT),
    "B3": ("lower", "R-", Radiance.SUBRADIANT),
    "B4": ("lower", "L-", Radiance.SUBRADIANT),
}


def intensity_profile(mode: CollectiveMode) -> IntensityProfile:
    """Per-atom intensities ``|C_{n,+}|^2`` and ``|C_{n,-}|^2``."""
    return IntensityProfile(np.abs(mode.plus) ** 2, np.abs(mode.minus) ** 2)


def _weights(vectors: np.ndarray, window: int):
    """Left/right window weights and plus fraction for columns of ``vectors``."""
    n_atoms = vectors.shape[0] // 2
    if window < 0 or 2 * window > n_atoms:
        raise ValueError(f"window must satisfy 0 <= window <= N/2, got {window} for N = {n_atoms}")
    prob = np.abs(vectors) ** 2
    per_atom = prob[0::2] + prob[1::2]
    left = per_atom[:window].sum(axis=0)
    right = per_atom[n_atoms - window:].sum(axis=0) if window else np.zeros(vectors.shape[1])
    plus = prob[0::2].sum(axis=0)
    return left, right, plus


def _label(detuning, decay, left, right, plus, gaps, th: Thresholds) -> ModeLabel:
    ambiguous = False
    left_hit = left > th.edge_threshold
    right_hit = right > th.edge_threshold
    if left_hit and right_hit:
        ambiguous = True
        side = Side.BULK
    elif left_hit:
        side = Side.LEFT
    elif right_hit:
        side = Side.RIGHT
    else:
        side = Side.BULK
    edge = {Side.LEFT: left, Side.RIGHT: right}.get(side, max(left, right))
    if plus > th.pol_threshold:
        pol = Polarization.PLUS
    elif plus < 1.0 - th.pol_threshold:
        pol = Polarization.MINUS
    else:
        pol = Polarization.MIXED
    radiance = Radiance.SUPERRADIANT if decay > 1.0 else Radiance.SUBRADIANT
    in_gap = gaps is not None and gaps.band_distance(detuning) > th.band_edge_tol
    return ModeLabel(side, pol, radiance, float(edge), float(plus), bool(in_gap),
                     float(left), float(right), ambiguous)


def classify_mode(
    mode: CollectiveMode, gaps: GapSet | None = None, thresholds: Thresholds = Thresholds()
) -> ModeLabel:
    """Assign boundary side, dominant polarization and radiance to a mode.

    A mode sits on a boundary when more than ``edge_threshold`` of its weight
    lies on the outermost ``window`` atoms there.  If both ends qualify the
    mode is reported as bulk with ``ambiguous`` set (and a warning).
    """
    left, right, plus = _weights(mode.amplitudes[:, None], thresholds.window)
    label = _label(mode.detuning, mode.decay, left[0], right[0], plus[0], gaps, thresholds)
    if label.ambiguous:
        warnings.warn("mode exceeds the edge threshold at both ends", RuntimeWarning)
    return label


def label_sweep(
    sweep: SpectrumSet, gaps: GapSet | None = None, thresholds: Thresholds = Thresholds()
) -> list[list[ModeLabel]]:
    """Labels for every mode of an open-chain sweep, indexed ``[phase][mode]``."""
    if not sweep.results:
        raise ValueError("sweep carries no eigenvectors (not an open-chain sweep?)")
    out = []
    for res in sweep.results:
        left, right, plus = _weights(res.vectors, thresholds.window)
        out.append([
            _label(m.detuning, m.decay, l, r, p, gaps, thresholds)
            for m, l, r, p in zip(res.modes, left, right, plus)
        ])
    return out


# --- branches ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Branch:
    """Boundary-state branch followed across consecutive phase samples.

    ``nodes`` are ``(phase_index, mode_index)`` pairs into the sweep.
    ``phases`` are unwrapped, so they stay continuous along the branch even
    when it crosses ``phase = 0``.
    """

    branch_id: int
    side: Side
    polarization: Polarization
    gap: int | None
    nodes: tuple
    phases: np.ndarray
    detunings: np.ndarray
    decays: np.ndarray
    in_gap: np.ndarray
    jump_tol: float

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def tag(self) -> str:
        sign = {Polarization.PLUS: "+", Polarization.MINUS: "-"}.get(self.polarization, "~")
        return self.side.value[0] + sign


def _is_periodic(phases: np.ndarray) -> bool:
    if phases.size < 3:
        return False
    step = np.diff(phases)
    # either direction: the step after the last sample closes one full period
    return np.allclose(step, step[0]) and np.isclose(
        abs(phases[-1] + step[0] - phases[0]), 2 * np.pi
    )


def track_branches(
    sweep: SpectrumSet,
    gaps: GapSet,
    thresholds: Thresholds = Thresholds(),
    labels: list[list[ModeLabel]] | None = None,
) -> list[Branch]:
    """Follow in-gap boundary states from phase to phase.

    Boundary modes at neighbouring phases are linked when they sit on the
    same side and are each other's nearest neighbour in detuning.  Links
    longer than ``jump_factor`` times the median in-gap link length are
    cut.  Mutual nearest-neighbour links make branch membership independent
    of the sweep direction.  Only chains that pass
    through a gap (farther than ``band_edge_tol`` from every band) are kept.
    """
    if labels is None:
        labels = label_sweep(sweep, gaps, thresholds)
    phases = np.asarray(sweep.phase_grid, dtype=float)
    n_phase = phases.size
    det = [r.detunings for r in sweep.results]
    cand = [
        {side: np.array([j for j, lab in enumerate(row) if lab.side is side], dtype=int)
         for side in (Side.LEFT, Side.RIGHT)}
        for row in labels
    ]
    periodic = _is_periodic(phases)
    pairs = [(i, i + 1) for i in range(n_phase - 1)]
    if periodic:
        pairs.append((n_phase - 1, 0))

    def nearest(src_val, dst_idx, dst_det):
        if dst_idx.size == 0:
            return None
        d = np.abs(dst_det[dst_idx] - src_val)
        return int(dst_idx[np.argmin(d)])

    links = []
    for a, b in pairs:
        for side in (Side.LEFT, Side.RIGHT):
            src, dst = cand[a][side], cand[b][side]
            for j in src:
                k = nearest(det[a][j], dst, det[b])
                if k is not None and nearest(det[b][k], src, det[a]) == j:
                    links.append(((a, int(j)), (b, k), abs(det[b][k] - det[a][j])))
    if not links:
        return []
    gap_steps = [s for (a, j), (b, k), s in links if labels[a][j].in_gap and labels[b][k].in_gap]
    scale = float(np.median(gap_steps or [s for _, _, s in links]))
    jump_tol = thresholds.jump_factor * max(scale, 1e-12)
    nxt, prv = {}, {}
    for u, v, s in links:
        if s <= jump_tol:
            nxt[u] = v
            prv[v] = u

    nodes = sorted((i, int(j)) for i, row in enumerate(cand) for idx in row.values() for j in idx)
    seen = set()
    chains = []
    # open chains first (from nodes without predecessor), then closed cycles
    for start in [n for n in nodes if n not in prv] + nodes:
        if start in seen:
            continue
        chain = [start]
        seen.add(start)
        while chain[-1] in nxt and nxt[chain[-1]] not in seen:
            chain.append(nxt[chain[-1]])
            seen.add(chain[-1])
        chains.append(chain)

    branches = []
    for chain in chains:
        in_gap = np.array([labels[i][j].in_gap for i, j in chain])
        gap_ids = [gaps.gap_index(det[i][j], thresholds.band_edge_tol) for i, j in chain]
        gap_ids = [g for g in gap_ids if g is not None]
        if not in_gap.any() or not gap_ids:
            continue
        gap = max(set(gap_ids), key=lambda g: (gap_ids.count(g), -g))
        ph = phases[[i for i, _ in chain]].copy()
        if periodic:
            ph = np.concatenate([[ph[0]], ph[0] + np.cumsum(wrap_angle(np.diff(ph)))])
        pols = [labels[i][j].polarization for (i, j), g in zip(chain, in_gap) if g]
        pols = [p for p in pols if p is not Polarization.MIXED]
        if pols:
            pol = max((Polarization.PLUS, Polarization.MINUS), key=pols.count)
            if pols.count(Polarization.PLUS) == pols.count(Polarization.MINUS):
                pol = Polarization.MIXED
        else:
            pol = Polarization.MIXED
        branches.append(Branch(
            len(branches), labels[chain[0][0]][chain[0][1]].side, pol, gap, tuple(chain), ph,
            np.array([det[i][j] for i, j in chain]),
            np.array([sweep.results[i].modes[j].decay for i, j in chain]),
            in_gap, jump_tol,
        ))
    return branches


def _branch_values(sweep: SpectrumSet, branch: Branch):
    det = np.array([sweep.results[i].modes[j].detuning for i, j in branch.nodes])
    dec = np.array([sweep.results[i].modes[j].decay for i, j in branch.nodes])
    steps = np.abs(np.diff(det))
    if steps.size and steps.max() > branch.jump_tol:
        raise BranchError(
            f"branch {branch.branch_id} jumps by {steps.max():.3g} > tolerance {branch.jump_tol:.3g}"
        )
    return det, dec


def branch_slope(sweep: SpectrumSet, branch: Branch) -> float:
    """Median central-difference slope d(detuning)/d(phase) along the branch.

    Only the in-gap part is used when it has at least three samples.
    """
    if len(branch) < 3:
        raise ValueError("branch needs at least three samples for a slope")
    det, _ = _branch_values(sweep, branch)
    ph = branch.phases
    central = (det[2:] - det[:-2]) / (ph[2:] - ph[:-2])
    inner_gap = branch.in_gap[1:-1]
    if inner_gap.sum() >= 1 and branch.in_gap.sum() >= 3:
        central = central[inner_gap]
    return float(np.median(central))


def decay_range_along_branch(sweep: SpectrumSet, branch: Branch) -> tuple[float, float]:
    """Smallest and largest decay rate met along a branch."""
    _, dec = _branch_values(sweep, branch)
    return float(dec.min()), float(dec.max())
