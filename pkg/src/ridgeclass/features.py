"""Feature fusion and the persistent labeled feature database.

A sample's feature vector is the concatenation of its singular-value
spectrum (spectrum first) and its sub-band energy vector; either part can
be dropped to run spectrum-only or energy-only experiments. Databases are
stored in a small versioned binary format with a CRC-32 integrity check.
"""

from __future__ import annotations

import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from . import dwt, svd
from .errors import (
    ChecksumMismatchError,
    EmptyDatasetError,
    FormatVersionMismatchError,
    ShapeMismatchError,
)
from .image_io import Gender, GrayImage, SampleMeta

MAGIC = b"RGC1"


class FeatureMode(Enum):
    DWT_ONLY = "dwt"
    SVD_ONLY = "svd"
    FUSED = "fused"


class FeatureLayout(NamedTuple):
    spectrum_len: int
    energy_len: int

    @property
    def total(self) -> int:
        return self.spectrum_len + self.energy_len


@dataclass
class FusedFeature:
    values: np.ndarray
    layout: FeatureLayout


@dataclass
class LabeledFeature:
    feature: FusedFeature
    gender: Gender
    finger_no: int
    source_id: str


@dataclass
class DatabaseConfig:
    k_level: int
    wavelet: str
    image_shape: tuple[int, int]  # (rows, cols)
    layout: FeatureLayout


@dataclass
class FeatureDatabase:
    entries: list[LabeledFeature]
    config: DatabaseConfig


def feature_length(image_shape: tuple[int, int], k: int,
                   mode: FeatureMode = FeatureMode.FUSED) -> int:
    """Feature length is a pure function of shape and level: min(R,C) + 3k+1."""
    spectrum = min(image_shape) if mode is not FeatureMode.DWT_ONLY else 0
    energy = 3 * k + 1 if mode is not FeatureMode.SVD_ONLY else 0
    return spectrum + energy


def extract_features(
    image: GrayImage,
    k: int,
    wavelet: str = dwt.DEFAULT_WAVELET,
    boundary: str = dwt.DEFAULT_BOUNDARY,
    mode: FeatureMode = FeatureMode.FUSED,
) -> FusedFeature:
    """Extract the feature vector of one image: spectrum, then energies.

    The order is frozen in the database file format; for a 300x260 image
    at level 6 the fused vector has 260 + 19 = 279 entries.
    """
    parts = []
    spectrum_len = 0
    energy_len = 0
    if mode is not FeatureMode.DWT_ONLY:
        spectrum = svd.singular_values(image.pixels)
        spectrum_len = len(spectrum.values)
        parts.append(spectrum.values)
    if mode is not FeatureMode.SVD_ONLY:
        energies = dwt.energy_vector(dwt.decompose(image, k, wavelet, boundary))
        energy_len = len(energies.energies)
        parts.append(energies.energies)
    values = np.concatenate(parts)
    return FusedFeature(values=values, layout=FeatureLayout(spectrum_len, energy_len))


def build_database(
    samples: list[tuple[GrayImage, SampleMeta]],
    k: int,
    wavelet: str = dwt.DEFAULT_WAVELET,
    boundary: str = dwt.DEFAULT_BOUNDARY,
    mode: FeatureMode = FeatureMode.FUSED,
    workers: Optional[int] = None,
) -> FeatureDatabase:
    """Extract features for every sample and collect them, order-preserving.

    All images must share one shape (the spectrum length is shape-determined,
    and Euclidean comparison requires uniform vectors). `workers` > 1 runs
    the per-sample extraction on a thread pool; results are collected in
    input order either way.
    """
    if not samples:
        raise EmptyDatasetError("cannot build a database from zero samples")
    shape = (samples[0][0].rows, samples[0][0].cols)
    for image, meta in samples:
        if (image.rows, image.cols) != shape:
            raise ShapeMismatchError(
                f"{meta.image_path}: image is {image.rows}x{image.cols}, "
                f"database shape is {shape[0]}x{shape[1]}"
            )

    def extract_one(sample: tuple[GrayImage, SampleMeta]) -> FusedFeature:
        return extract_features(sample[0], k, wavelet, boundary, mode)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            features = list(pool.map(extract_one, samples))
    else:
        features = [extract_one(s) for s in samples]

    entries = [
        LabeledFeature(
            feature=feat,
            gender=meta.gender,
            finger_no=meta.finger_no,
            source_id=meta.image_path.as_posix(),
        )
        for feat, (_, meta) in zip(features, samples)
    ]
    layout = entries[0].feature.layout
    config = DatabaseConfig(k_level=k, wavelet=wavelet, image_shape=shape, layout=layout)
    return FeatureDatabase(entries=entries, config=config)


def _pack_database(db: FeatureDatabase) -> bytes:
    cfg = db.config
    wavelet_bytes = cfg.wavelet.encode("utf-8")
    parts = [
        struct.pack("<H", cfg.k_level),
        struct.pack("<B", len(wavelet_bytes)),
        wavelet_bytes,
        struct.pack("<IIIII", cfg.image_shape[0], cfg.image_shape[1],
                    cfg.layout.spectrum_len, cfg.layout.energy_len, len(db.entries)),
    ]
    total = cfg.layout.total
    for entry in db.entries:
        if len(entry.feature.values) != total:
            raise ShapeMismatchError(
                f"entry {entry.source_id}: feature length {len(entry.feature.values)} "
                f"does not match database layout {total}"
            )
        sid = entry.source_id.encode("utf-8")
        parts.append(struct.pack("<BBH", ord(entry.gender.value), entry.finger_no, len(sid)))
        parts.append(sid)
        parts.append(np.asarray(entry.feature.values, dtype="<f8").tobytes())
    payload = b"".join(parts)
    return MAGIC + payload + struct.pack("<I", zlib.crc32(payload))


def save_database(db: FeatureDatabase, path) -> None:
    """Serialize a database; same inputs always produce bit-identical files."""
    Path(path).write_bytes(_pack_database(db))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatVersionMismatchError(
                f"database truncated: needed {n} bytes at offset {self.pos}, "
                f"only {len(self.data) - self.pos} remain"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_database(path) -> FeatureDatabase:
    """Load a database file, verifying magic and CRC-32 before parsing."""
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 4 or raw[: len(MAGIC)] != MAGIC:
        raise FormatVersionMismatchError(
            f"{path}: not a feature database (expected magic {MAGIC!r})"
        )
    payload, (stored_crc,) = raw[len(MAGIC) : -4], struct.unpack("<I", raw[-4:])
    actual_crc = zlib.crc32(payload)
    if actual_crc != stored_crc:
        raise ChecksumMismatchError(
            f"{path}: CRC-32 mismatch (stored {stored_crc:#010x}, "
            f"computed {actual_crc:#010x})"
        )
    r = _Reader(payload)
    (k_level,) = r.unpack("<H")
    (wavelet_len,) = r.unpack("<B")
    wavelet = r.take(wavelet_len).decode("utf-8")
    rows, cols, spectrum_len, energy_len, count = r.unpack("<IIIII")
    layout = FeatureLayout(spectrum_len, energy_len)
    entries = []
    for _ in range(count):
        gender_byte, finger_no, sid_len = r.unpack("<BBH")
        source_id = r.take(sid_len).decode("utf-8")
        values = np.frombuffer(r.take(8 * layout.total), dtype="<f8").astype(np.float64)
        entries.append(
            LabeledFeature(
                feature=FusedFeature(values=values, layout=layout),
                gender=Gender(chr(gender_byte)),
                finger_no=finger_no,
                source_id=source_id,
            )
        )
    if r.pos != len(payload):
        raise FormatVersionMismatchError(
            f"{path}: {len(payload) - r.pos} unexpected trailing payload bytes"
        )
    config = DatabaseConfig(
        k_level=k_level, wavelet=wavelet, image_shape=(rows, cols), layout=layout
    )
    return FeatureDatabase(entries=entries, config=config)
