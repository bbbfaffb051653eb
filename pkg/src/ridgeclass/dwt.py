"""Multilevel dyadic 2-D wavelet decomposition and sub-band energies.

Each level splits the current approximation into LL/LH/HL/HH quarters by
separable low/high-pass filtering with 2:1 decimation; the decomposition
recurses on LL only, so k levels yield 3k+1 sub-bands. The per-band
feature is the mean absolute coefficient value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyMatrixError, TooManyLevelsError, UnknownWaveletError
from .image_io import GrayImage

DEFAULT_WAVELET = "haar"
DEFAULT_BOUNDARY = "symmetric"

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# Orthonormal scaling (low-pass) coefficients; the matching high-pass is
# derived by the quadrature-mirror rule hi[m] = (-1)^m * lo[L-1-m].
_SCALING = {
    "haar": [1.0 / _SQRT2, 1.0 / _SQRT2],
    "db2": [
        (1.0 + _SQRT3) / (4.0 * _SQRT2),
        (3.0 + _SQRT3) / (4.0 * _SQRT2),
        (3.0 - _SQRT3) / (4.0 * _SQRT2),
        (1.0 - _SQRT3) / (4.0 * _SQRT2),
    ],
}
_SCALING["db1"] = _SCALING["haar"]

_BOUNDARY_PAD_MODE = {"symmetric": "symmetric", "periodic": "wrap"}


def wavelet_filters(name: str) -> tuple[np.ndarray, np.ndarray]:
    """Analysis (low, high) filter pair for a registered wavelet name."""
    try:
        lo = np.asarray(_SCALING[name], dtype=np.float64)
    except KeyError:
        known = ", ".join(sorted(_SCALING))
        raise UnknownWaveletError(f"unknown wavelet {name!r} (available: {known})") from None
    hi = np.array([(-1.0) ** m * lo[len(lo) - 1 - m] for m in range(len(lo))])
    return lo, hi


@dataclass
class Subband:
    kind: str  # "LL", "LH", "HL" or "HH"
    level: int
    coeffs: np.ndarray


@dataclass
class SubbandPyramid:
    """k-level pyramid in canonical order: deepest LL first, then for each
    level from k down to 1 the LH, HL, HH detail bands (3k+1 bands total)."""

    levels: int
    subbands: list[Subband]


@dataclass
class EnergyVector:
    k: int
    energies: np.ndarray  # length 3k+1, canonical sub-band order


def _analyze_axis(x: np.ndarray, lo: np.ndarray, hi: np.ndarray, axis: int,
                  boundary: str) -> tuple[np.ndarray, np.ndarray]:
    """One analysis step along `axis`: filter, decimate 2:1, ceil-size output."""
    try:
        pad_mode = _BOUNDARY_PAD_MODE[boundary]
    except KeyError:
        known = ", ".join(sorted(_BOUNDARY_PAD_MODE))
        raise UnknownWaveletError(
            f"unknown boundary mode {boundary!r} (available: {known})"
        ) from None
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    out_len = (n + 1) // 2
    filt_len = len(lo)
    left = filt_len // 2 - 1
    right = 2 * out_len - n + filt_len // 2 - 1
    pad = [(0, 0)] * (x.ndim - 1) + [(left, right)]
    xe = np.pad(x, pad, mode=pad_mode)
    low = np.zeros(x.shape[:-1] + (out_len,))
    high = np.zeros_like(low)
    for m in range(filt_len):
        window = xe[..., m : m + 2 * out_len - 1 : 2]
        low += lo[m] * window
        high += hi[m] * window
    return np.moveaxis(low, -1, axis), np.moveaxis(high, -1, axis)


def dwt2_single_level(
    matrix: np.ndarray,
    wavelet: str = DEFAULT_WAVELET,
    boundary: str = DEFAULT_BOUNDARY,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One 2-D analysis level, returning (LL, LH, HL, HH).

    The first letter names the filter applied down the rows (vertical),
    the second the filter applied across the columns (horizontal), so LH
    holds horizontal (column-direction) detail and HL vertical detail.
    Output quarters are ceil(R/2) x ceil(C/2); odd extents are handled by
    the configured boundary extension.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise EmptyMatrixError("dwt2_single_level needs a non-empty 2-D matrix")
    lo, hi = wavelet_filters(wavelet)
    row_low, row_high = _analyze_axis(matrix, lo, hi, axis=0, boundary=boundary)
    ll, lh = _analyze_axis(row_low, lo, hi, axis=1, boundary=boundary)
    hl, hh = _analyze_axis(row_high, lo, hi, axis=1, boundary=boundary)
    return ll, lh, hl, hh


def decompose(
    image: GrayImage,
    k: int,
    wavelet: str = DEFAULT_WAVELET,
    boundary: str = DEFAULT_BOUNDARY,
) -> SubbandPyramid:
    """Decompose `image` into a k-level pyramid (recursing on LL only).

    Pixel intensities enter the transform as raw 0..255 reals, without
    rescaling. Raises :class:`TooManyLevelsError` once the approximation
    drops below 2 samples in either direction before level k.
    """
    if k < 1:
        raise ValueError(f"decomposition level must be >= 1, got {k}")
    current = image.pixels.astype(np.float64)
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    for level in range(1, k + 1):
        if current.shape[0] < 2 or current.shape[1] < 2:
            raise TooManyLevelsError(
                f"image of {image.rows}x{image.cols} exhausted at level {level} "
                f"(approximation is {current.shape[0]}x{current.shape[1]}); "
                f"cannot reach level {k}"
            )
        ll, lh, hl, hh = dwt2_single_level(current, wavelet, boundary)
        details.append((lh, hl, hh))
        current = ll
    subbands = [Subband("LL", k, current)]
    for level in range(k, 0, -1):
        lh, hl, hh = details[level - 1]
        subbands.append(Subband("LH", level, lh))
        subbands.append(Subband("HL", level, hl))
        subbands.append(Subband("HH", level, hh))
    return SubbandPyramid(levels=k, subbands=subbands)


def subband_energy(band: np.ndarray) -> float:
    """Mean absolute coefficient value of one sub-band."""
    band = np.asarray(band, dtype=np.float64)
    if band.size == 0:
        raise EmptyMatrixError("cannot compute the energy of an empty band")
    return float(np.mean(np.abs(band)))


def energy_vector(pyramid: SubbandPyramid) -> EnergyVector:
    """Per-band energies in canonical order; length 3k+1 for a k-level pyramid."""
    energies = np.array([subband_energy(b.coeffs) for b in pyramid.subbands])
    return EnergyVector(k=pyramid.levels, energies=energies)
