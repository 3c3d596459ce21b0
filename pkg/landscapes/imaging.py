"""
Grayscale image landscapes.

PGM (P2 plain and P5 raw, maxval up to 65535) is the only image format.
Reading is strict and reports the byte offset of the first problem;
writing goes through Pillow.
"""
import logging
from pathlib import Path
from typing import Iterable

import numpy as np
from PIL import Image
from scipy import ndimage

from .exceptions import InvalidDomainError, PgmFormatError
from .fields import ImageField

logger = logging.getLogger("bflyflow")

_WHITESPACE = b" \t\n\r\x0b\x0c"
_OTHER_NETPBM = {b"P1", b"P3", b"P4", b"P6", b"P7"}


class _HeaderReader:
    """Tokenizer over a Netpbm header that tracks byte offsets and skips comments."""

    def __init__(self, data: bytes, offset: int = 2):
        self.data = data
        self.offset = offset
        self.token_start = offset

    def _skip_separators(self):
        data = self.data
        while self.offset < len(data):
            byte = data[self.offset:self.offset + 1]
            if byte in _WHITESPACE:
                self.offset += 1
            elif byte == b"#":
                while self.offset < len(data) and data[self.offset:self.offset + 1] not in (b"\n", b"\r"):
                    self.offset += 1
            else:
                break

    def integer(self, what: str) -> int:
        self._skip_separators()
        start = self.token_start = self.offset
        while self.offset < len(self.data) and self.data[self.offset:self.offset + 1].isdigit():
            self.offset += 1
        if start == self.offset:
            if start >= len(self.data):
                raise PgmFormatError(f"file truncated while reading {what}", start)
            raise PgmFormatError(f"expected a decimal {what}", start)
        return int(self.data[start:self.offset])


def parse_pgm(data: bytes) -> tuple[np.ndarray, int]:
    """
    Decode PGM bytes into an (H, W) integer array and its maxval.

    Raises:
        PgmFormatError: non-grayscale magic, malformed header, sample above
            maxval, or truncated pixel data
    """
    magic = data[:2]
    if magic in _OTHER_NETPBM:
        raise PgmFormatError(f"magic number {magic.decode()} is not a grayscale PGM (need P2 or P5)", 0)
    if magic not in (b"P2", b"P5"):
        raise PgmFormatError(f"not a PGM file (magic {magic!r})", 0)

    header = _HeaderReader(data)
    width = header.integer("width")
    height = header.integer("height")
    maxval = header.integer("maxval")
    maxval_offset = header.token_start
    if width < 1 or height < 1:
        raise PgmFormatError(f"image size must be positive, got {width}x{height}", maxval_offset)
    if not 1 <= maxval <= 65535:
        raise PgmFormatError(f"maxval must lie in [1, 65535], got {maxval}", maxval_offset)

    count = width * height
    if magic == b"P5":
        if header.offset >= len(data) or data[header.offset:header.offset + 1] not in _WHITESPACE:
            raise PgmFormatError("expected a single whitespace byte after maxval", header.offset)
        start = header.offset + 1
        sample_bytes = 2 if maxval > 255 else 1
        end = start + count * sample_bytes
        if len(data) < end:
            raise PgmFormatError(
                f"pixel data truncated: need {count * sample_bytes} bytes, found {len(data) - start}",
                len(data),
            )
        dtype = ">u2" if sample_bytes == 2 else "u1"
        pixels = np.frombuffer(data, dtype=dtype, count=count, offset=start).astype(np.int64)
        over = np.flatnonzero(pixels > maxval)
        if over.size:
            raise PgmFormatError(
                f"sample {int(pixels[over[0]])} exceeds maxval {maxval}", start + int(over[0]) * sample_bytes
            )
    else:
        pixels = np.empty(count, dtype=np.int64)
        for k in range(count):
            value = header.integer(f"sample {k}")
            if value > maxval:
                raise PgmFormatError(f"sample {value} exceeds maxval {maxval}", header.token_start)
            pixels[k] = value
    return pixels.reshape(height, width), maxval


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a PGM file; see parse_pgm."""
    return parse_pgm(Path(path).read_bytes())


def write_pgm(path, pixels: np.ndarray) -> Path:
    """
    Write integer pixels as a raw (P5) PGM with Pillow.

    maxval is 255 when every sample fits in a byte, otherwise 65535.
    """
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise InvalidDomainError(f"pixels must be a 2-D array, got shape {pixels.shape}")
    if pixels.min() < 0 or pixels.max() > 65535:
        raise InvalidDomainError("pixel values must lie in [0, 65535]")
    if pixels.max() <= 255:
        image = Image.fromarray(pixels.astype(np.uint8))
    else:
        image = Image.fromarray(pixels.astype(np.int32))
    path = Path(path)
    image.save(path, format="PPM")
    return path


def load_image_field(path, gamma: float = 2.0) -> ImageField:
    """Load a PGM as a normalised, gamma-sharpened image landscape."""
    pixels, maxval = read_pgm(path)
    logger.info(f"Loaded {path}: {pixels.shape[1]}x{pixels.shape[0]} px, maxval {maxval}")
    return ImageField(pixels, gamma=gamma, source=str(path))


def synthetic_blob_image(shape: tuple[int, int], blobs: Iterable[tuple[float, float, float, float]],
                         maxval: int = 255, background: float = 0.0) -> np.ndarray:
    """
    Integer grayscale image with Gaussian bright blobs.

    Each blob is (center_x, center_y, sigma_px, intensity in [0, 1]);
    overlapping blobs add up and saturate at maxval.
    """
    height, width = shape
    rows, cols = np.mgrid[0:height, 0:width]
    canvas = np.full(shape, float(background))
    for cx, cy, sigma, intensity in blobs:
        canvas += intensity * np.exp(-((cols - cx) ** 2 + (rows - cy) ** 2) / (2.0 * sigma ** 2))
    return np.rint(np.clip(canvas, 0.0, 1.0) * maxval).astype(np.int64)


def bright_region_boxes(field: ImageField, threshold: float = 0.5,
                        dilate: float = 0.0) -> list[tuple[float, float, float, float]]:
    """
    Bounding boxes (x_min, y_min, x_max, y_max) of connected regions whose
    fitness is at least threshold, largest region first, optionally grown
    by dilate pixels on every side.
    """
    mask = field.values >= threshold
    labels, count = ndimage.label(mask, structure=np.ones((3, 3)))
    if count == 0:
        return []
    sizes = ndimage.sum_labels(mask, labels, index=np.arange(1, count + 1))
    boxes = []
    for label_index, region in enumerate(ndimage.find_objects(labels)):
        rows, cols = region
        boxes.append((
            sizes[label_index],
            (cols.start - dilate, rows.start - dilate, cols.stop - 1 + dilate, rows.stop - 1 + dilate),
        ))
    boxes.sort(key=lambda item: -item[0])
    return [tuple(float(v) for v in box) for _, box in boxes]


def inside_box(points: np.ndarray, box: tuple[float, float, float, float],
               tol: float = 0.0) -> np.ndarray:
    """Which (x, y) points fall inside an (x_min, y_min, x_max, y_max) box."""
    points = np.atleast_2d(points)
    x_min, y_min, x_max, y_max = box
    return ((points[:, 0] >= x_min - tol) & (points[:, 0] <= x_max + tol)
            & (points[:, 1] >= y_min - tol) & (points[:, 1] <= y_max + tol))
