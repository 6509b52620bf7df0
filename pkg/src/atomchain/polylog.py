"""Polylogarithms ``Li_s(exp(i*theta))`` for ``s = 1, 2, 3`` on the unit circle.

The real/imaginary parts split into a closed Bernoulli polynomial and a
Clausen function.  The Clausen parts are evaluated on ``|theta| <= pi`` from
their expansion about ``theta = 0``,

    Cl_2(t) = t - t log|t| + sum_k zeta(2k) t^(2k+1) / (k (2k+1) (2 pi)^(2k))
    Cl_3(t) = zeta(3) - 3 t^2 / 4 + t^2 log|t| / 2
              - sum_k zeta(2k) t^(2k+2) / (k (2k+1) (2k+2) (2 pi)^(2k))

whose terms shrink at least like ``4**-k`` there; 40 terms reach double
precision.
"""
from __future__ import annotations

import numpy as np
from scipy.special import zeta

_K = np.arange(1, 41)
_ZETA_EVEN = zeta(2.0 * _K)
_CL2_COEF = _ZETA_EVEN / (_K * (2 * _K + 1) * (2 * np.pi) ** (2 * _K))
_CL3_COEF = _ZETA_EVEN / (_K * (2 * _K + 1) * (2 * _K + 2) * (2 * np.pi) ** (2 * _K))
_ZETA3 = float(zeta(3.0))


def wrap_angle(theta):
    """Map angles to ``[-pi, pi)``.

    Angles already inside are returned unchanged: shifting by pi first would
    round away the low bits of small angles.
    """
    theta = np.asarray(theta, dtype=float)
    inside = (theta >= -np.pi) & (theta < np.pi)
    return np.where(inside, theta, np.remainder(theta + np.pi, 2 * np.pi) - np.pi)


def _series(t2, coef):
    # Horner in t^2 over the truncated power series
    acc = np.zeros_like(t2)
    for c in coef[::-1]:
        acc = (acc + c) * t2
    return acc


def clausen2(theta):
    """``sum_n sin(n theta) / n**2``."""
    t = wrap_angle(theta)
    at = np.abs(t)
    log_t = np.log(np.where(at > 0, at, 1.0))
    return t - t * log_t + t * _series(t * t, _CL2_COEF)


def clausen3(theta):
    """``sum_n cos(n theta) / n**3``."""
    t = wrap_angle(theta)
    t2 = t * t
    log_t = np.log(np.where(t2 > 0, np.abs(t), 1.0))
    return _ZETA3 - 0.75 * t2 + 0.5 * t2 * log_t - t2 * _series(t2, _CL3_COEF)


def eval_polylog(s: int, theta):
    """Evaluate ``Li_s(exp(1j * theta))`` for ``s`` in ``{1, 2, 3}``.

    Accepts scalars or arrays; the result has the shape of ``theta``.
    ``Li_1`` diverges at ``theta = 0 (mod 2 pi)`` and raises there.
    """
    if s not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {s!r}")
    t = wrap_angle(theta)
    at = np.abs(t)
    sgn = np.sign(t)
    if s == 1:
        if np.any(at == 0.0):
            raise ValueError("Li_1 diverges at theta = 0 mod 2*pi")
        out = -np.log(2.0 * np.abs(np.sin(0.5 * t))) + 1j * (0.5 * np.pi * sgn - 0.5 * t)
    elif s == 2:
        out = np.pi**2 / 6 - at * (2 * np.pi - at) / 4 + 1j * clausen2(t)
    else:
        im = sgn * (np.pi**2 * at / 6 - np.pi * at**2 / 4 + at**3 / 12)
        out = clausen3(t) + 1j * im
    if np.ndim(out) == 0:
        return complex(out)
    return out
