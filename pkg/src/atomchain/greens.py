"""Photon-mediated couplings between atoms on the chain axis.

All couplings are in units of the single-atom decay rate and already carry
the ``3 pi gamma_0 / k_0`` prefactor of the effective Hamiltonian.  With
``x = 2 pi d`` (``d`` in wavelengths)::

    j_same  = -(3/8) exp(ix) (x^2 - i x + 1) / x^3     (++ and --)
    j_cross =  (3/8) exp(ix) (x^2 + 3 i x - 3) / x^3   (+- and -+)

Infinite-lattice sums ``sum_{l != 0} J(|l| a) exp(i kappa l)`` decay only
like ``1/l``.  They are evaluated either in closed form through ``Li_1``,
``Li_2`` and ``Li_3`` on the unit circle or by brute-force partial sums with
Cesaro averaging of the tail.  Bloch momenta are always given as the phase
per lattice site, ``kappa = k * a``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .polylog import eval_polylog, wrap_angle

#: half-width (in radians of Bloch phase) of the excluded light-line neighbourhood
EPS_LIGHT = 1e-6

#: default number of lattice sites kept by the truncated sums
L_MAX = 10**6

_PREF = 3.0 / 8.0
_CHUNK = 1 << 20
_CACHE_LIMIT = 1 << 21


class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    TRUNCATED = "Truncated"


class LightLineSingular(ValueError):
    """A Bloch momentum sits on the light line, where ``Li_1`` diverges."""

    def __init__(self, kappa: float, theta: float):
        super().__init__(
            f"Bloch phase {kappa!r} lies on the light line "
            f"(|theta0 +/- kappa| mod 2pi = {abs(theta):.3g}); shift the momentum grid"
        )
        self.kappa = kappa
        self.theta = theta


@dataclass(frozen=True)
class PairCoupling:
    j_same: complex
    j_cross: complex


@dataclass(frozen=True)
class BlochCoupling:
    f_same: complex
    f_cross: complex
    method: Method
    est_error: float


def coupling_kernel(d):
    """Vectorised ``(j_same, j_cross)`` for separations ``d > 0``."""
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("separations must be strictly positive")
    x = 2.0 * np.pi * d
    phase = np.exp(1j * x) / x**3
    j_same = -_PREF * phase * (x * x - 1j * x + 1.0)
    j_cross = _PREF * phase * (x * x + 3j * x - 3.0)
    return j_same, j_cross


def pair_coupling(d: float) -> PairCoupling:
    """Coupling between two atoms a distance ``d`` (wavelengths) apart.

    Only positive separations are accepted; the kernel depends on ``|d|``
    and self-interaction is excluded.
    """
    d = float(d)
    if not d > 0:
        raise ValueError(f"separation must be > 0, got {d!r}")
    js, jc = coupling_kernel(d)
    return PairCoupling(complex(js), complex(jc))


# --- closed form -----------------------------------------------------------

def _check_light_line(kappa, spacing, eps_light):
    theta0 = 2.0 * np.pi * spacing
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    for sign in (1.0, -1.0):
        dist = np.abs(wrap_angle(theta0 + sign * kappa))
        bad = np.flatnonzero(dist < eps_light)
        if bad.size:
            i = int(bad[0])
            raise LightLineSingular(float(kappa[i]), float(dist[i]))


def _closed_form(kappa, spacing):
    theta0 = 2.0 * np.pi * spacing
    kappa = np.asarray(kappa, dtype=float)
    s1 = eval_polylog(1, theta0 + kappa) + eval_polylog(1, theta0 - kappa)
    s2 = eval_polylog(2, theta0 + kappa) + eval_polylog(2, theta0 - kappa)
    s3 = eval_polylog(3, theta0 + kappa) + eval_polylog(3, theta0 - kappa)
    t1, t2, t3 = s1 / theta0, s2 / theta0**2, s3 / theta0**3
    f_same = -_PREF * (t1 - 1j * t2 + t3)
    f_cross = _PREF * (t1 + 3j * t2 - 3.0 * t3)
    scale = _PREF * (np.abs(t1) + 3 * np.abs(t2) + 3 * np.abs(t3))
    return f_same, f_cross, 1e-14 * np.maximum(scale, 1.0)


def bloch_sum_array(kappa, spacing: float, eps_light: float = EPS_LIGHT):
    """Closed-form lattice sums for an array of Bloch phases.

    Returns ``(f_same, f_cross)`` arrays shaped like ``kappa``.
    """
    _check_light_line(kappa, spacing, eps_light)
    f_same, f_cross, _ = _closed_form(kappa, spacing)
    return f_same, f_cross


def supercell_couplings(q: int, kappa: float, spacing: float, eps_light: float = EPS_LIGHT):
    """Sublattice couplings ``g(d) = sum_{j = d mod q, j != 0} J(|j| a) exp(i kappa j)``.

    Returns two length-``q`` arrays indexed by ``d = 0 .. q-1``.  This is the
    periodic-gauge supercell hopping: the Bloch Hamiltonian entry between
    sublattice sites ``n`` and ``m`` is ``g((m - n) mod q)``.
    """
    shifted = kappa + 2.0 * np.pi * np.arange(q) / q
    f_same, f_cross = bloch_sum_array(shifted, spacing, eps_light)
    return np.fft.fft(f_same) / q, np.fft.fft(f_cross) / q


# --- truncated sums --------------------------------------------------------

def _amplitudes(spacing, d, q, start, stop):
    """Kernel values for the paired terms ``M = start .. stop-1``.

    Term ``M`` pairs ``j = d + M q`` with ``j = d - (M+1) q``.
    """
    m = np.arange(start, stop, dtype=float)
    pos = d + m * q
    neg = (m + 1.0) * q - d
    pos_ok = pos > 0
    ps, pc = coupling_kernel(np.where(pos_ok, pos, 1.0) * spacing)
    ns, nc = coupling_kernel(neg * spacing)
    ps = np.where(pos_ok, ps, 0.0)
    pc = np.where(pos_ok, pc, 0.0)
    return m, ps, pc, ns, nc


@lru_cache(maxsize=4)
def _cached_amplitudes(spacing, d, q, n):
    out = _amplitudes(spacing, d, q, 0, n)
    for arr in out:
        arr.setflags(write=False)
    return out


def _truncated(kappa, spacing, d, q, l_max):
    """Cesaro-averaged partial sums of ``sum_L J(|d + L q| a) exp(i kappa L q)``."""
    n = max(int(l_max) // q, 4)
    theta0 = 2.0 * np.pi * spacing
    # per-term phase advance of the two one-sided series
    psi = np.abs(wrap_angle(q * np.array([theta0 + kappa, theta0 - kappa])))
    period = 2.0 * np.pi / max(float(psi.min()), 1e-300)
    n_periods = max(1, math.floor(0.5 * n / period))
    window = min(n, max(2, int(round(period * n_periods))))

    tail = np.empty((2, window), dtype=complex)
    total = np.zeros(2, dtype=complex)
    first_kept = n - window
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        if n <= _CACHE_LIMIT:
            m, ps, pc, ns, nc = (a[start:stop] for a in _cached_amplitudes(spacing, d, q, n))
        else:
            m, ps, pc, ns, nc = _amplitudes(spacing, d, q, start, stop)
        bloch = np.exp(1j * kappa * q * m)
        back = np.exp(-1j * kappa * q * (m + 1.0))
        partial = np.cumsum(
            np.stack([ps * bloch + ns * back, pc * bloch + nc * back]), axis=1
        )
        partial += total[:, None]
        total = partial[:, -1].copy()
        lo = max(start, first_kept)
        if lo < stop:
            tail[:, lo - first_kept : stop - first_kept] = partial[:, lo - start :]
    half = window // 2
    est = np.abs(tail[:, :half].mean(axis=1) - tail[:, half : 2 * half].mean(axis=1))
    value = tail.mean(axis=1)
    return value[0], value[1], float(est.max())


# --- public sums -----------------------------------------------------------

def bloch_sum(
    kappa: float,
    spacing: float,
    method: Method = Method.CLOSED_FORM,
    eps_light: float = EPS_LIGHT,
    l_max: int = L_MAX,
) -> BlochCoupling:
    """Infinite-chain sum ``sum_{l != 0} J(|l| a) exp(i kappa l)``.

    Parameters
    ----------
    kappa : float
        Bloch phase per site.
    spacing : float
        Lattice constant ``a`` in wavelengths.
    method : Method
        ``CLOSED_FORM`` (polylogarithms) or ``TRUNCATED`` (partial sums to
        ``l_max`` sites, tail averaged over whole oscillation periods).

    Raises
    ------
    LightLineSingular
        If ``theta0 +/- kappa`` is within ``eps_light`` of a multiple of 2 pi.
    """
    if spacing <= 0:
        raise ValueError("spacing must be > 0")
    kappa = float(kappa)
    _check_light_line(kappa, spacing, eps_light)
    if method is Method.CLOSED_FORM:
        fs, fc, est = _closed_form(kappa, spacing)
        return BlochCoupling(complex(fs), complex(fc), method, float(est))
    fs, fc, est = _truncated(kappa, spacing, 0, 1, l_max)
    return BlochCoupling(complex(fs), complex(fc), method, est)


def residue_class_sum(
    d: int,
    q: int,
    k: float,
    spacing: float,
    method: Method = Method.CLOSED_FORM,
    eps_light: float = EPS_LIGHT,
    l_max: int = L_MAX,
) -> BlochCoupling:
    """Sum over one residue class: ``sum_{L, d + L q != 0} J(|d + L q| a) exp(i k L q)``.

    ``k`` is the Bloch phase per site.  The closed form splits the residue
    class with a discrete Fourier transform over the ``q`` momenta
    ``k + 2 pi t / q`` and reuses :func:`bloch_sum`.
    """
    d, q = int(d), int(q)
    if q < 1 or not 0 <= d < q:
        raise ValueError(f"need q >= 1 and 0 <= d < q, got d={d}, q={q}")
    if spacing <= 0:
        raise ValueError("spacing must be > 0")
    k = float(k)
    shifted = k + 2.0 * np.pi * np.arange(q) / q
    _check_light_line(shifted, spacing, eps_light)
    if method is Method.CLOSED_FORM:
        fs, fc, est = _closed_form(shifted, spacing)
        twiddle = np.exp(-2j * np.pi * np.arange(q) * d / q) / q
        gauge = np.exp(-1j * k * d)
        return BlochCoupling(
            complex(gauge * twiddle @ fs),
            complex(gauge * twiddle @ fc),
            method,
            float(est.max()),
        )
    fs, fc, est = _truncated(k, spacing, d, q, l_max)
    return BlochCoupling(complex(fs), complex(fc), method, est)
