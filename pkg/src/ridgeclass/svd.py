"""Singular-value spectrum of an image matrix.

Uses one-sided Jacobi: plane rotations are applied to column pairs of the
taller orientation until every pair is numerically orthogonal, at which
point the column norms are the singular values. Only the values are
produced; the orthogonal factors are never materialized. The inner loop
is JIT-compiled (numba) so full spectra of 300x260 images stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import EmptyMatrixError, NonFiniteInputError

# Column pairs count as orthogonal when |<ci,cj>| <= TOL * ||ci|| * ||cj||.
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60


@dataclass
class SingularSpectrum:
    """All min(R, C) singular values, descending, zeros included."""

    values: np.ndarray
    source_shape: tuple[int, int]


@njit(cache=True, nogil=True)
def _jacobi_singular_values(w: np.ndarray, tol: float, max_sweeps: int) -> np.ndarray:
    m, n = w.shape
    norms = np.empty(n)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += w[i, j] * w[i, j]
        norms[j] = acc
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                gamma = 0.0
                for i in range(m):
                    gamma += w[i, p] * w[i, q]
                alpha = norms[p]
                beta = norms[q]
                if abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for i in range(m):
                    wp = w[i, p]
                    wq = w[i, q]
                    w[i, p] = c * wp - s * wq
                    w[i, q] = s * wp + c * wq
                norms[p] = alpha - gamma * t
                norms[q] = beta + gamma * t
        if not rotated:
            break
    # cached norms drift over many rotations; recompute exactly
    out = np.empty(n)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += w[i, j] * w[i, j]
        out[j] = np.sqrt(acc)
    return out


def singular_values(matrix: np.ndarray) -> SingularSpectrum:
    """Full singular-value spectrum of a real matrix, descending order.

    The result has length min(R, C) with trailing zeros retained, so the
    feature length is determined by the matrix shape, not its rank.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise EmptyMatrixError("singular_values needs a non-empty 2-D matrix")
    if not np.isfinite(a).all():
        raise NonFiniteInputError("matrix contains NaN or infinite entries")
    shape = (a.shape[0], a.shape[1])
    w = np.array(a.T if a.shape[0] < a.shape[1] else a, dtype=np.float64, order="F")
    values = _jacobi_singular_values(w, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    values = np.sort(values)[::-1].copy()
    return SingularSpectrum(values=values, source_shape=shape)
