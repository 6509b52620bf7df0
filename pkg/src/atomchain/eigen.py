"""Dense non-Hermitian eigendecomposition with residual checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import CollectiveMode, ComplexEigenvalue, normalize_amplitudes

#: relative residual ``|Hv - Ev| / |H|_F`` accepted per mode
TOL_EIG = 1e-9


class EigenError(RuntimeError):
    """The solver failed or returned modes above the residual tolerance."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (max residual {residual:.3g})")
        self.residual = residual


@dataclass(frozen=True)
class EigenResult:
    modes: tuple
    max_residual: float

    @property
    def energies(self) -> np.ndarray:
        return np.array([m.eigenvalue.energy for m in self.modes])

    @property
    def detunings(self) -> np.ndarray:
        return np.array([m.detuning for m in self.modes])

    @property
    def decays(self) -> np.ndarray:
        return np.array([m.decay for m in self.modes])

    @property
    def vectors(self) -> np.ndarray:
        """Amplitudes as columns, in mode order."""
        return np.stack([m.amplitudes for m in self.modes], axis=1)


@dataclass(frozen=True)
class ResidualReport:
    residuals: np.ndarray
    max_residual: float
    flagged: tuple
    tol: float

    @property
    def ok(self) -> bool:
        return not self.flagged


def sort_order(energies: np.ndarray) -> np.ndarray:
    """Indices ordering eigenvalues by detuning, then by decay."""
    energies = np.asarray(energies)
    return np.lexsort((-2.0 * energies.imag, energies.real))


def _residuals(matrix, energies, vectors):
    fro = np.linalg.norm(matrix)
    if fro == 0.0:
        fro = 1.0
    res = matrix @ vectors - vectors * energies[None, :]
    return np.linalg.norm(res, axis=0) / fro


def eigenvalues(matrix) -> np.ndarray:
    """Sorted eigenvalues only; accepts a stack of matrices ``(..., n, n)``.

    Used by the sweeps, where eigenvectors are not needed.  The trace identity
    is checked as a cheap consistency test.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if not np.all(np.isfinite(matrix)):
        raise EigenError("matrix has non-finite entries")
    try:
        vals = np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"eigenvalue solver failed: {exc}") from exc
    trace = np.trace(matrix, axis1=-2, axis2=-1)
    scale = np.maximum(np.linalg.norm(matrix, axis=(-2, -1)), 1.0) * matrix.shape[-1]
    if np.any(np.abs(vals.sum(axis=-1) - trace) > 1e-8 * scale):
        raise EigenError("trace identity violated")
    energy = vals.reshape(-1, vals.shape[-1])
    order = [sort_order(row) for row in energy]
    out = np.stack([row[o] for row, o in zip(energy, order)])
    return out.reshape(vals.shape)


def eigendecompose(matrix, tol_eig: float = TOL_EIG) -> EigenResult:
    """Full spectrum and right eigenvectors of a dense complex matrix.

    Eigenvalues ``E`` become ``(detuning, decay) = (Re E, -2 Im E)``.  Modes
    are sorted by detuning (ties by decay), unit-normalised, and rotated so
    their largest component is real and positive.

    Raises
    ------
    EigenError
        If LAPACK fails to converge or any mode's relative residual exceeds
        ``tol_eig``.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise ValueError("expected a non-empty square matrix")
    if not np.all(np.isfinite(matrix)):
        raise EigenError("matrix has non-finite entries")
    try:
        vals, vecs = scipy.linalg.eig(matrix, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise EigenError(f"eigensolver did not converge: {exc}") from exc
    order = sort_order(vals)
    vals, vecs = vals[order], vecs[:, order]
    vecs = np.stack([normalize_amplitudes(v) for v in vecs.T], axis=1)
    res = _residuals(matrix, vals, vecs)
    max_res = float(res.max())
    if not max_res <= tol_eig:
        raise EigenError("eigenpairs above residual tolerance", max_res)
    modes = tuple(
        CollectiveMode(ComplexEigenvalue.from_complex(e), v, float(r))
        for e, v, r in zip(vals, vecs.T, res)
    )
    return EigenResult(modes, max_res)


def verify_residuals(matrix, result: EigenResult, tol_eig: float = TOL_EIG) -> ResidualReport:
    """Recompute every mode's residual and flag those above ``tol_eig``."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape[0] != len(result.modes):
        raise ValueError("matrix dimension does not match the number of modes")
    res = _residuals(matrix, result.energies, result.vectors)
    flagged = tuple(int(i) for i in np.flatnonzero(~(res <= tol_eig)))
    return ResidualReport(res, float(res.max()), flagged, tol_eig)
