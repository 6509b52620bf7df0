"""Spectral sweeps: butterfly spectrum versus flux and open-chain spectra
versus modulation phase, plus band-gap detection.
"""
from __future__ import annotations

import enum
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import TOL_PSD, ChainConfig
from .eigen import eigendecompose, eigenvalues
from .greens import EPS_LIGHT, LightLineSingular
from .hamiltonian import Q_MAX, bloch_stack, build_finite, rational_flux

K_SAMPLES = 64
PHASE_SAMPLES = 32
PHASE_POINTS = 201
#: in-gap test: distance from every bulk band region, in units of the decay rate
BAND_EDGE_TOL = 0.05
MIN_GAP_WIDTH = 0.1


class SweepKind(enum.Enum):
    BUTTERFLY_VS_FLUX = "ButterflyVsFlux"
    OPEN_CHAIN_VS_PHASE = "OpenChainVsPhase"


class Origin(enum.Enum):
    BLOCH = "Bloch"
    OPEN_CHAIN = "OpenChain"


class SweepError(RuntimeError):
    """A sweep point failed; the message names the offending grid point."""


@dataclass(frozen=True, eq=False)
class SpectrumSet:
    """Eigenvalues tagged by their sweep coordinates, stored column-wise.

    ``sample`` groups points that came from one diagonalisation (one
    ``(k, phase)`` pair of a Bloch run, or one phase of an open chain).  For
    open-chain sweeps ``results`` keeps the full eigendecomposition at every
    phase of ``phase_grid``.
    """

    sweep_kind: SweepKind
    origin: Origin
    sweep_coord: np.ndarray
    detuning: np.ndarray
    decay: np.ndarray
    k: np.ndarray
    phase: np.ndarray
    sample: np.ndarray
    results: tuple = ()
    phase_grid: np.ndarray = field(default_factory=lambda: np.empty(0))
    config: ChainConfig | None = None

    def __post_init__(self):
        for name in ("sweep_coord", "detuning", "decay", "k", "phase", "sample"):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.decay < -TOL_PSD):
            raise ValueError("spectrum contains unphysical negative decay rates")

    def __len__(self) -> int:
        return self.detuning.size

    def select(self, mask) -> "SpectrumSet":
        mask = np.asarray(mask)
        return SpectrumSet(
            self.sweep_kind, self.origin, self.sweep_coord[mask], self.detuning[mask],
            self.decay[mask], self.k[mask], self.phase[mask], self.sample[mask],
            config=self.config,
        )

    def at_flux(self, b) -> "SpectrumSet":
        return self.select(self.sweep_coord == float(b))

    def records(self) -> Iterable[dict]:
        for i in range(len(self)):
            k = float(self.k[i])
            yield {
                "sweep_coord": float(self.sweep_coord[i]),
                "detuning": float(self.detuning[i]),
                "decay": float(self.decay[i]),
                "origin": self.origin.value,
                "k": None if np.isnan(k) else k,
                "phase": float(self.phase[i]),
            }


def _empty_like_cols(n):
    return np.full(n, np.nan)


def parallel_map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    """Order-preserving map over independent sweep points."""
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- Bloch sweeps -----------------------------------------------------------

def k_grid(q: int, k_samples: int) -> np.ndarray:
    """Midpoint grid over the reduced zone ``[-pi/q, pi/q)`` (per-site phase)."""
    return -np.pi / q + (np.arange(k_samples) + 0.5) * 2.0 * np.pi / (q * k_samples)


def bloch_phase_grid(q: int, phase_samples: int) -> np.ndarray:
    """Phases covering ``[0, 2 pi / q)``.

    Shifting the phase by ``2 pi p / q`` only relabels supercell sites, and
    the multiples of ``p/q`` exhaust ``1/q``, so this window covers every
    distinct spectrum.
    """
    return 2.0 * np.pi * np.arange(phase_samples) / (q * phase_samples)


def _as_fraction(b, q_max: int) -> Fraction:
    if isinstance(b, Fraction):
        return b
    if isinstance(b, tuple):
        return Fraction(*b)
    return rational_flux(float(b), q_max)


def bloch_spectrum(
    flux,
    k_samples: int = K_SAMPLES,
    phase_samples: int = PHASE_SAMPLES,
    spacing: float = 0.1,
    zeeman_amp: float = 10.0,
    q_max: int = Q_MAX,
    eps_light: float = EPS_LIGHT,
) -> SpectrumSet:
    """Bloch spectrum at one flux, projected over ``k`` and the phase."""
    frac = _as_fraction(flux, q_max)
    p, q = frac.numerator, frac.denominator
    ks = k_grid(q, k_samples)
    phases = bloch_phase_grid(q, phase_samples)
    energies = np.empty((ks.size, phases.size, 2 * q), dtype=complex)
    for i, k in enumerate(ks):
        try:
            stack = bloch_stack(p, q, k, phases, spacing, zeeman_amp, eps_light)
        except LightLineSingular as exc:
            raise SweepError(f"b = {p}/{q}, k = {k!r}, phase = any: {exc}") from exc
        energies[i] = eigenvalues(stack)
    n_pts = energies.size
    kk = np.broadcast_to(ks[:, None, None], energies.shape).ravel()
    pp = np.broadcast_to(phases[None, :, None], energies.shape).ravel()
    sample = np.broadcast_to(
        np.arange(ks.size * phases.size).reshape(ks.size, phases.size, 1), energies.shape
    ).ravel()
    decay = -2.0 * energies.imag.ravel()
    return SpectrumSet(
        SweepKind.BUTTERFLY_VS_FLUX, Origin.BLOCH, np.full(n_pts, float(frac)),
        energies.real.ravel(), decay, kk, pp, sample,
    )


def concat(sets: Sequence[SpectrumSet]) -> SpectrumSet:
    first = sets[0]
    offsets = np.cumsum([0] + [int(s.sample.max()) + 1 if len(s) else 0 for s in sets[:-1]])
    return SpectrumSet(
        first.sweep_kind, first.origin,
        np.concatenate([s.sweep_coord for s in sets]),
        np.concatenate([s.detuning for s in sets]),
        np.concatenate([s.decay for s in sets]),
        np.concatenate([s.k for s in sets]),
        np.concatenate([s.phase for s in sets]),
        np.concatenate([s.sample + o for s, o in zip(sets, offsets)]),
    )


def butterfly_sweep(
    flux_grid: Sequence,
    k_samples: int = K_SAMPLES,
    phase_samples: int = PHASE_SAMPLES,
    spacing: float = 0.1,
    zeeman_amp: float = 10.0,
    q_max: int = Q_MAX,
    workers: int | None = None,
) -> SpectrumSet:
    """Projected Bloch spectrum for every flux of ``flux_grid``.

    Grid entries may be :class:`~fractions.Fraction`, ``(p, q)`` tuples, or
    floats (replaced by their continued-fraction convergent with
    ``q <= q_max``).
    """
    fracs = [_as_fraction(b, q_max) for b in flux_grid]
    too_big = [f for f in fracs if f.denominator > q_max]
    if too_big:
        raise ValueError(f"flux {too_big[0]} has q > q_max = {q_max}")
    parts = parallel_map(
        lambda f: bloch_spectrum(f, k_samples, phase_samples, spacing, zeeman_amp, q_max),
        fracs,
        workers,
    )
    return concat(parts)


# --- open chains ------------------------------------------------------------

def phase_grid(points: int = PHASE_POINTS) -> np.ndarray:
    """``points`` equally spaced phases over ``[0, 2 pi)``."""
    return 2.0 * np.pi * np.arange(points) / points


def open_chain_sweep(
    config: ChainConfig, phases: Sequence[float], workers: int | None = None
) -> SpectrumSet:
    """Open-boundary spectrum of ``config`` at each modulation phase."""
    phases = np.asarray(phases, dtype=float)

    def solve(phi):
        cfg = config.replace(phase=phi)
        return eigendecompose(build_finite(cfg).matrix)

    results = tuple(parallel_map(solve, list(phases), workers))
    dim = 2 * config.n_atoms
    ph = np.repeat(phases, dim)
    return SpectrumSet(
        SweepKind.OPEN_CHAIN_VS_PHASE, Origin.OPEN_CHAIN, ph,
        np.concatenate([r.detunings for r in results]),
        np.concatenate([r.decays for r in results]),
        _empty_like_cols(ph.size), ph, np.repeat(np.arange(phases.size), dim),
        results=results, phase_grid=phases, config=config,
    )


# --- gaps -------------------------------------------------------------------

@dataclass(frozen=True)
class GapSet:
    """Detuning intervals free of bulk eigenvalues at one flux.

    ``intervals`` holds the gaps at least ``min_gap_width`` wide; ``bands``
    the projected bulk band regions they separate.
    """

    intervals: tuple
    bands: tuple
    min_gap_width: float

    def band_distance(self, detuning: float) -> float:
        """Distance to the nearest band region (0 inside a band)."""
        best = np.inf
        for lo, hi in self.bands:
            if lo <= detuning <= hi:
                return 0.0
            best = min(best, lo - detuning if detuning < lo else detuning - hi)
        return float(best)

    def gap_index(self, detuning: float, margin: float = 0.0) -> int | None:
        for i, (lo, hi) in enumerate(self.intervals):
            if lo + margin < detuning < hi - margin:
                return i
        return None

    def contains(self, detuning: float, margin: float = 0.0) -> bool:
        return self.gap_index(detuning, margin) is not None

    def widest(self, n: int) -> tuple:
        """The ``n`` widest gaps, in ascending detuning order."""
        ranked = sorted(self.intervals, key=lambda g: g[1] - g[0], reverse=True)[:n]
        return tuple(sorted(ranked))


def band_regions(spectrum: SpectrumSet) -> list[tuple[float, float]]:
    """Projected band regions from a sampled Bloch spectrum.

    The j-th smallest detuning at each ``(k, phase)`` sample is a continuous
    function on the sampled torus, so band j sweeps at least the interval
    between its extreme sampled values.  Overlapping intervals are merged.
    """
    if len(spectrum) == 0:
        raise ValueError("empty spectrum")
    order = np.argsort(spectrum.sample, kind="stable")
    samples = spectrum.sample[order]
    det = spectrum.detuning[order]
    _, counts = np.unique(samples, return_counts=True)
    if np.any(counts != counts[0]):
        raise ValueError("samples differ in size; spectrum mixes supercells")
    table = np.sort(det.reshape(-1, counts[0]), axis=1)
    lows, highs = table.min(axis=0), table.max(axis=0)
    merged: list[list[float]] = []
    for lo, hi in sorted(zip(lows.tolist(), highs.tolist())):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def detect_gaps(spectrum: SpectrumSet, min_gap_width: float = MIN_GAP_WIDTH) -> GapSet:
    """Band gaps of a ``(k, phase)``-projected Bloch spectrum at one flux."""
    if len(spectrum) == 0:
        raise ValueError("empty spectrum")
    if spectrum.origin is not Origin.BLOCH:
        raise ValueError("gap detection needs a Bloch spectrum")
    if np.unique(spectrum.sweep_coord).size != 1:
        raise ValueError("spectrum spans several flux values; select one first")
    bands = band_regions(spectrum)
    gaps = tuple(
        (a[1], b[0]) for a, b in zip(bands[:-1], bands[1:]) if b[0] - a[1] >= min_gap_width
    )
    return GapSet(gaps, tuple(bands), float(min_gap_width))


# --- output -----------------------------------------------------------------

def fmt(x) -> str:
    """17 significant digits: exact round trip for doubles."""
    if x is None:
        return ""
    x = float(x)
    if np.isnan(x):
        return ""
    return format(x, ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return path


def write_spectrum_csv(spectrum: SpectrumSet, path) -> Path:
    """CSV columns: ``sweep_coord, detuning, decay, origin, k, phase``."""
    origin = spectrum.origin.value
    rows = (
        (c, d, g, origin, k, p)
        for c, d, g, k, p in zip(
            spectrum.sweep_coord.tolist(), spectrum.detuning.tolist(),
            spectrum.decay.tolist(), spectrum.k.tolist(), spectrum.phase.tolist(),
        )
    )
    return write_csv(path, ("sweep_coord", "detuning", "decay", "origin", "k", "phase"), rows)


def write_spectrum_jsonl(spectrum: SpectrumSet, path) -> Path:
    """One JSON object per point with the same fields as the CSV."""
    path = Path(path)
    with path.open("w") as fh:
        for rec in spectrum.records():
            fh.write(json.dumps(rec) + "\n")
    return path
