"""Grayscale image and dataset handling.

Covers the raw inputs of the pipeline: binary PGM (P5) reading/writing,
rectangular cropping, CSV manifests describing labeled samples, and the
seeded stratified learning/testing split.
"""

from __future__ import annotations

import csv
import random
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    CorruptHeaderError,
    EmptyDatasetError,
    InvalidFingerNumberError,
    InvalidGenderError,
    ManifestParseError,
    RegionOutOfBoundsError,
    UnsupportedFormatError,
)

MANIFEST_HEADER = ["path", "gender", "finger", "age_group"]


class Gender(Enum):
    MALE = "M"
    FEMALE = "F"


class AgeGroup(Enum):
    UP_TO_12 = "<=12"
    Y13_TO_19 = "13-19"
    Y20_TO_25 = "20-25"
    Y26_TO_35 = "26-35"
    Y36_PLUS = "36+"


@dataclass(eq=False)
class GrayImage:
    """8-bit grayscale raster stored as a read-only (rows, cols) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("GrayImage needs a non-empty 2-D pixel array")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError("pixel values must be integers in [0, 255]")
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("pixel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.pixels = arr

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(
            self.pixels, other.pixels
        )


class CropRegion(NamedTuple):
    top: int
    left: int
    height: int
    width: int


@dataclass(frozen=True)
class SampleMeta:
    """Labeled sample: image location plus gender / finger / age metadata.

    Finger numbering runs 1 (left little) through 5 (left thumb), then
    6 (right thumb) through 10 (right little).
    """

    image_path: Path
    gender: Gender
    finger_no: int
    age_group: Optional[AgeGroup] = None

    def __post_init__(self):
        object.__setattr__(self, "image_path", Path(self.image_path))
        if not 1 <= self.finger_no <= 10:
            raise ValueError(f"finger_no must be in 1..10, got {self.finger_no}")


@dataclass
class DatasetSplit:
    learning: list[SampleMeta] = field(default_factory=list)
    testing: list[SampleMeta] = field(default_factory=list)


def _read_pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, honoring # comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last token.
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace():
            i += 1
        if i == start:
            raise CorruptHeaderError("unexpected end of header")
        tokens.append(data[start:i])
        # exactly one whitespace byte separates the header from the raster
        if len(tokens) == count:
            if i >= n:
                raise CorruptHeaderError("missing raster data after header")
            i += 1
    return tokens, i


def load_image(path) -> GrayImage:
    """Load a binary PGM (P5, maxval 255) file as a GrayImage.

    Color (P6), ASCII (P2) and 16-bit inputs are rejected rather than
    converted; a payload whose size disagrees with the header dimensions
    raises :class:`CorruptHeaderError`.
    """
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        magic = data[:2].decode("ascii", errors="replace")
        raise UnsupportedFormatError(
            f"{path}: expected binary PGM magic 'P5', found {magic!r}"
        )
    try:
        tokens, offset = _read_pgm_tokens(data[2:], 3)
    except CorruptHeaderError as exc:
        raise CorruptHeaderError(f"{path}: {exc}") from None
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptHeaderError(f"{path}: non-numeric header fields {tokens}") from None
    if maxval != 255:
        raise UnsupportedFormatError(
            f"{path}: only 8-bit images (maxval 255) are supported, got maxval {maxval}"
        )
    if width < 1 or height < 1:
        raise CorruptHeaderError(f"{path}: invalid dimensions {width}x{height}")
    payload = data[2 + offset :]
    if len(payload) != width * height:
        raise CorruptHeaderError(
            f"{path}: header says {width}x{height} ({width * height} bytes), "
            f"payload has {len(payload)} bytes"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(pixels)


def write_image(image: GrayImage, path) -> None:
    """Write a GrayImage as binary PGM (P5, maxval 255)."""
    header = f"P5\n{image.cols} {image.rows}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.pixels.tobytes())


def crop(image: GrayImage, region: CropRegion) -> GrayImage:
    """Return the sub-image under `region`; identity region is a no-op copy."""
    top, left, height, width = region
    if height < 1 or width < 1:
        raise RegionOutOfBoundsError(f"degenerate crop region {region}")
    if top < 0 or left < 0 or top + height > image.rows or left + width > image.cols:
        raise RegionOutOfBoundsError(
            f"region {region} exceeds image bounds {image.rows}x{image.cols}"
        )
    return GrayImage(image.pixels[top : top + height, left : left + width].copy())


def compose_regions(outer: CropRegion, inner: CropRegion) -> CropRegion:
    """Region equivalent to cropping by `outer` and then by `inner`."""
    return CropRegion(
        top=outer.top + inner.top,
        left=outer.left + inner.left,
        height=inner.height,
        width=inner.width,
    )


def _parse_row(line_no: int, row: list[str], base_dir: Path) -> SampleMeta:
    if len(row) != 4:
        raise ManifestParseError(line_no, f"expected 4 fields, got {len(row)}")
    raw_path, raw_gender, raw_finger, raw_age = (f.strip() for f in row)
    if not raw_path:
        raise ManifestParseError(line_no, "empty image path")
    try:
        gender = Gender(raw_gender)
    except ValueError:
        raise InvalidGenderError(
            line_no, f"gender must be 'M' or 'F', got {raw_gender!r}"
        ) from None
    try:
        finger_no = int(raw_finger)
    except ValueError:
        raise InvalidFingerNumberError(
            line_no, f"finger must be an integer in 1..10, got {raw_finger!r}"
        ) from None
    if not 1 <= finger_no <= 10:
        raise InvalidFingerNumberError(
            line_no, f"finger must be in 1..10, got {finger_no}"
        )
    age_group = None
    if raw_age:
        try:
            age_group = AgeGroup(raw_age)
        except ValueError:
            valid = ", ".join(a.value for a in AgeGroup)
            raise ManifestParseError(
                line_no, f"age_group must be one of {{{valid}}} or empty, got {raw_age!r}"
            ) from None
    return SampleMeta(
        image_path=base_dir / raw_path,
        gender=gender,
        finger_no=finger_no,
        age_group=age_group,
    )


def load_manifest(path) -> list[SampleMeta]:
    """Parse a dataset manifest CSV into SampleMeta records, in file order.

    Expected header: ``path,gender,finger,age_group``. Image paths are
    resolved relative to the manifest file's directory. Errors carry the
    offending 1-based line number.
    """
    path = Path(path)
    base_dir = path.parent
    samples: list[SampleMeta] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestParseError(1, "empty manifest") from None
        if [h.strip() for h in header] != MANIFEST_HEADER:
            raise ManifestParseError(
                1, f"expected header {','.join(MANIFEST_HEADER)!r}, got {','.join(header)!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            samples.append(_parse_row(line_no, row, base_dir))
    return samples


def write_manifest(samples: list[SampleMeta], path) -> None:
    """Write samples back out in manifest format, paths relative to `path`."""
    path = Path(path)
    base_dir = path.parent
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for s in samples:
            try:
                rel = s.image_path.relative_to(base_dir)
            except ValueError:
                rel = s.image_path
            writer.writerow(
                [
                    rel.as_posix(),
                    s.gender.value,
                    s.finger_no,
                    s.age_group.value if s.age_group else "",
                ]
            )


def split_dataset(samples: list[SampleMeta], seed: int) -> DatasetSplit:
    """Deterministic stratified 2/3 learning / 1/3 testing split.

    Strata are (gender, finger_no) groups; within each, a shuffle seeded
    from `seed` picks floor(2/3 * n) learning samples, the rest go to
    testing. A stratum too small to contribute any learning sample is
    kept (in testing) with a warning.
    """
    if not samples:
        raise EmptyDatasetError("cannot split an empty sample list")
    strata: dict[tuple[str, int], list[SampleMeta]] = {}
    for s in samples:
        strata.setdefault((s.gender.value, s.finger_no), []).append(s)
    rng = random.Random(seed)
    split = DatasetSplit()
    for key in sorted(strata):
        group = list(strata[key])
        rng.shuffle(group)
        n_learn = (2 * len(group)) // 3
        if n_learn == 0:
            warnings.warn(
                f"stratum gender={key[0]} finger={key[1]} has only "
                f"{len(group)} sample(s); none assigned to learning",
                stacklevel=2,
            )
        split.learning.extend(group[:n_learn])
        split.testing.extend(group[n_learn:])
    return split
