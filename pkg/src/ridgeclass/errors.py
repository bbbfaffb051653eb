"""Exception hierarchy for the ridgeclass package.

Plain I/O failures (missing files, unwritable paths) surface as the
builtin ``FileNotFoundError`` / ``OSError``; everything domain-specific
derives from :class:`RidgeclassError`.
"""


class RidgeclassError(Exception):
    """Base class for all errors raised by this package."""


class UnsupportedFormatError(RidgeclassError):
    """Image file is not binary 8-bit grayscale PGM (P5, maxval 255)."""


class CorruptHeaderError(RidgeclassError):
    """Image header is malformed or inconsistent with the payload size."""


class RegionOutOfBoundsError(RidgeclassError):
    """Crop rectangle does not lie fully inside the image."""


class ManifestParseError(RidgeclassError):
    """Manifest row could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class InvalidGenderError(ManifestParseError):
    """Gender field is not 'M' or 'F'."""


class InvalidFingerNumberError(ManifestParseError):
    """Finger field is not an integer in 1..10."""


class EmptyDatasetError(RidgeclassError):
    """An operation that needs at least one sample received none."""


class EmptyMatrixError(RidgeclassError):
    """A matrix operation received an empty (zero-sized) input."""


class TooManyLevelsError(RidgeclassError):
    """Image too small for the requested decomposition depth."""


class UnknownWaveletError(RidgeclassError):
    """Configured wavelet name is not in the filter registry."""


class NonFiniteInputError(RidgeclassError):
    """Matrix contains NaN or infinite entries."""


class ShapeMismatchError(RidgeclassError):
    """Samples with differing image dimensions in one database build."""


class FormatVersionMismatchError(RidgeclassError):
    """Database file magic/structure does not match the supported format."""


class ChecksumMismatchError(RidgeclassError):
    """Database file payload fails its CRC-32 integrity check."""


class LengthMismatchError(RidgeclassError):
    """Two feature vectors of differing length were compared."""


class KTooLargeError(RidgeclassError):
    """Requested neighbor count exceeds the database size."""


class InvalidSpecError(RidgeclassError):
    """Synthetic dataset specification is internally inconsistent."""


class InsufficientDataError(RidgeclassError):
    """Evaluation cannot proceed (e.g. a gender has no test samples)."""
