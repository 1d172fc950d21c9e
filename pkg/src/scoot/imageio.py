"""Grayscale raster I/O, quantization and the perturbations used by the meta-measures.

Images are held as 2-D ``uint8`` numpy arrays indexed ``[row, column]``
(``[y, x]``).  All functions return new arrays and never touch their inputs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyImageError,
    ImageLoadError,
    UnreadableImageError,
    UnsupportedImageError,
)

WHITE = 255


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel raster."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255) or np.any(px != np.round(px)):
                raise ValueError("pixel values must be integers in [0, 255]")
            px = px.astype(np.uint8)
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True)
class QuantizedImage:
    """Per-pixel grade indices in ``[0, n_levels)``."""

    grades: np.ndarray
    n_levels: int

    def __post_init__(self):
        g = np.asarray(self.grades)
        if g.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {g.shape}")
        if self.n_levels < 2:
            raise ValueError("n_levels must be >= 2")
        if g.size and (g.min() < 0 or g.max() >= self.n_levels):
            raise ValueError(f"grades must lie in [0, {self.n_levels})")
        g = g.astype(np.intp, copy=True)
        g.setflags(write=False)
        object.__setattr__(self, "grades", g)

    @property
    def width(self) -> int:
        return self.grades.shape[1]

    @property
    def height(self) -> int:
        return self.grades.shape[0]


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def _pgm_tokens(data: bytes, path):
    """Yield (token, end_offset) for the four PGM header fields."""
    pos = 0
    n = len(data)
    for _ in range(4):
        while pos < n:
            ch = data[pos:pos + 1]
            if ch == b"#":
                while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise UnreadableImageError(path, "truncated PGM header")
        yield data[start:pos], pos


def _read_pgm(data: bytes, path) -> np.ndarray:
    tokens = list(_pgm_tokens(data, path))
    magic = tokens[0][0]
    if magic != b"P5":
        raise UnsupportedImageError(path, f"unsupported PGM variant {magic!r}")
    try:
        width, height, maxval = (int(t) for t, _ in tokens[1:])
    except ValueError:
        raise UnreadableImageError(path, "malformed PGM header") from None
    if maxval != 255:
        raise UnsupportedImageError(path, f"unsupported bit depth (maxval {maxval})")
    if width < 1 or height < 1:
        raise EmptyImageError(path, f"zero-dimension image {width}x{height}")
    # exactly one whitespace byte separates the header from the raster
    offset = tokens[-1][1] + 1
    raster = data[offset:offset + width * height]
    if len(raster) != width * height:
        raise UnreadableImageError(path, "truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def _read_png(path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I;16", "I;16B", "I", "F", "1"):
                raise UnsupportedImageError(path, f"unsupported bit depth (mode {mode})")
            if mode == "P":
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
                mode = im.mode
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError) as exc:
        raise UnreadableImageError(path, str(exc)) from None
    if arr.size == 0:
        raise EmptyImageError(path, "zero-dimension image")
    if mode == "L":
        return arr
    if mode == "LA":
        return arr[..., 0]
    if mode in ("RGB", "RGBA"):
        return luma(arr[..., :3])
    raise UnsupportedImageError(path, f"unsupported color mode {mode}")


def luma(rgb: np.ndarray) -> np.ndarray:
    """Reduce an ``(H, W, 3)`` RGB array with ``round(0.299R + 0.587G + 0.114B)``."""
    rgb = np.asarray(rgb, dtype=np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)


def load_gray(path) -> GrayImage:
    """Load a PGM (P5, maxval 255) or 8-bit PNG file as a :class:`GrayImage`.

    RGB input is reduced with :func:`luma`.  Every failure raises a subclass of
    :class:`~scoot.errors.ImageLoadError` carrying ``path``.
    """
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UnreadableImageError(path, exc.strerror or str(exc)) from None
    if data[:2] == b"P5":
        arr = _read_pgm(data, path)
    elif data[:2] in (b"P1", b"P2", b"P3", b"P4", b"P6"):
        raise UnsupportedImageError(path, f"unsupported netpbm variant {data[:2]!r}")
    elif data[:8] == b"\x89PNG\r\n\x1a\n":
        arr = _read_png(path)
    else:
        raise UnreadableImageError(path, "not a PGM or PNG file")
    try:
        return GrayImage(arr)
    except ValueError as exc:
        raise ImageLoadError(path, str(exc)) from None


def save_pgm(img: GrayImage, path) -> None:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(img.pixels).tobytes())


# ---------------------------------------------------------------------------
# Quantization
# ---------------------------------------------------------------------------

def quantize(img: GrayImage, n_levels: int) -> QuantizedImage:
    """Map intensities to ``n_levels`` uniform grades: ``min(v * n // 256, n - 1)``."""
    if not isinstance(n_levels, (int, np.integer)) or not 2 <= n_levels <= 256:
        raise ValueError(f"n_levels must be an integer in [2, 256], got {n_levels!r}")
    v = img.pixels.astype(np.intp)
    grades = np.minimum(v * int(n_levels) // 256, n_levels - 1)
    return QuantizedImage(grades, int(n_levels))


def as_levels(img: GrayImage) -> QuantizedImage:
    """Raw intensities viewed as 256 grades (the non-quantized setting)."""
    return QuantizedImage(img.pixels, 256)


# ---------------------------------------------------------------------------
# Geometric and photometric perturbations
# ---------------------------------------------------------------------------

def _nn_index(n_out: int, n_in: int) -> np.ndarray:
    idx = (2 * np.arange(n_out) + 1) * n_in // (2 * n_out)
    return np.minimum(idx, n_in - 1)


def resize_nn(img: GrayImage, new_width: int, new_height: int) -> GrayImage:
    """Nearest-neighbour resize using pixel centres.

    Output pixel ``(x, y)`` copies source ``(floor((x + .5) W / W'), floor((y + .5) H / H'))``,
    clamped to the source bounds.
    """
    if new_width < 1 or new_height < 1:
        raise ValueError(f"target size must be >= 1x1, got {new_width}x{new_height}")
    cols = _nn_index(new_width, img.width)
    rows = _nn_index(new_height, img.height)
    return GrayImage(img.pixels[np.ix_(rows, cols)])


def shrink(img: GrayImage, pixels: int = 5) -> GrayImage:
    """Downsize both axes by ``pixels`` with :func:`resize_nn`."""
    return resize_nn(img, img.width - pixels, img.height - pixels)


def rotate_nn(img: GrayImage, degrees_ccw: float, fill: int = WHITE) -> GrayImage:
    """Rotate counter-clockwise (as displayed) about the image centre.

    Each output pixel takes the nearest source pixel under the inverse rotation;
    samples falling outside the source get ``fill``.
    """
    if not math.isfinite(degrees_ccw):
        raise ValueError("rotation angle must be finite")
    h, w = img.shape
    turns = degrees_ccw / 90.0
    if turns == int(turns):
        # exact quarter turns avoid sin/cos rounding at 90, 180, ...
        q = int(turns) % 4
        cos_t, sin_t = ((1, 0), (0, 1), (-1, 0), (0, -1))[q]
    else:
        t = math.radians(degrees_ccw)
        cos_t, sin_t = math.cos(t), math.sin(t)
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    ys, xs = np.mgrid[0:h, 0:w]
    dx = xs - cx
    dy = ys - cy
    # y grows downward, so a visual CCW turn maps output -> source with this sign pattern
    sx = cos_t * dx - sin_t * dy + cx
    sy = sin_t * dx + cos_t * dy + cy
    ix = np.floor(sx + 0.5).astype(np.intp)
    iy = np.floor(sy + 0.5).astype(np.intp)
    inside = (ix >= 0) & (ix < w) & (iy >= 0) & (iy < h)
    out = np.full((h, w), fill, dtype=np.uint8)
    out[inside] = img.pixels[iy[inside], ix[inside]]
    return GrayImage(out)


def split_strokes(img: GrayImage, threshold: int = 170) -> tuple[GrayImage, GrayImage]:
    """Split a sketch into ``(dark, light)`` stroke images at ``threshold``.

    ``dark`` keeps pixels below the threshold, ``light`` keeps the rest; removed
    pixels are whitened.
    """
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    px = img.pixels
    below = px < threshold
    dark = np.where(below, px, WHITE).astype(np.uint8)
    light = np.where(below, WHITE, px).astype(np.uint8)
    return GrayImage(dark), GrayImage(light)
