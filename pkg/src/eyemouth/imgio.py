"""Image containers, netpbm I/O, grayscale conversion and resampling.

Images are plain numpy arrays indexed ``[row, col]``:

* RGB images are ``uint8`` arrays of shape ``(h, w, 3)``.
* Gray images are ``float64`` arrays of shape ``(h, w)``. Raw grayscale
  lies in [0, 255]; Haar detail images may be negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ImageFormatError(ValueError):
    """Raised when a PGM/PPM file cannot be parsed."""


class BoundsError(ValueError):
    """Raised when a rectangle does not fit inside an image."""


class SizeError(ValueError):
    """Raised when an image or patch is too small for an operation."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, top-left origin, x rightward, y downward."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise SizeError(f"rect extent must be >= 1, got {self.w}x{self.h}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    def inside(self, width: int, height: int) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x2 <= width and self.y2 <= height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)


def as_gray(values) -> np.ndarray:
    """Validate and convert ``values`` to a float64 gray image."""
    img = np.asarray(values, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise SizeError(f"gray image must be a non-empty 2D array, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("gray image contains non-finite values")
    return img


# ---------------------------------------------------------------------------
# netpbm codec

def _read_header(data: bytes, magic: bytes, path) -> tuple[int, int, int]:
    """Parse ``magic width height maxval`` and return (width, height, offset)."""
    if data[:2] != magic:
        raise ImageFormatError(f"{path}: bad magic {data[:2]!r}, expected {magic!r}")
    fields = []
    pos = 2
    n = len(data)
    names = ("width", "height", "maxval")
    while len(fields) < 3:
        # whitespace and comments between header tokens
        while pos < n and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        name = names[len(fields)]
        if not token:
            raise ImageFormatError(f"{path}: header truncated, missing {name}")
        try:
            value = int(token)
        except ValueError:
            raise ImageFormatError(f"{path}: {name} is not an integer: {token!r}") from None
        fields.append(value)
    width, height, maxval = fields
    if width < 1:
        raise ImageFormatError(f"{path}: width must be >= 1, got {width}")
    if height < 1:
        raise ImageFormatError(f"{path}: height must be >= 1, got {height}")
    if maxval != 255:
        raise ImageFormatError(f"{path}: maxval must be 255, got {maxval}")
    if pos >= n or not data[pos:pos + 1].isspace():
        raise ImageFormatError(f"{path}: missing whitespace after maxval")
    return width, height, pos + 1


def _read_netpbm(path, magic: bytes, channels: int) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    width, height, offset = _read_header(data, magic, path)
    expected = width * height * channels
    payload = data[offset:offset + expected]
    if len(payload) < expected:
        raise ImageFormatError(
            f"{path}: truncated payload, expected {expected} bytes, got {len(payload)}")
    arr = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, channels).copy()


def read_ppm(path) -> np.ndarray:
    """Read a binary P6 file as a ``(h, w, 3)`` uint8 array."""
    return _read_netpbm(path, b"P6", 3)


def read_pgm(path) -> np.ndarray:
    """Read a binary P5 file as a float64 gray image."""
    return _read_netpbm(path, b"P5", 1).astype(np.float64)


def read_image(path) -> np.ndarray:
    """Read either a P5 or P6 file, dispatching on the magic bytes.

    Returns a float gray image for P5 and a uint8 RGB array for P6.
    """
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        return read_pgm(path)
    if magic == b"P6":
        return read_ppm(path)
    raise ImageFormatError(f"{path}: bad magic {magic!r}, expected b'P5' or b'P6'")


def _quantize(values) -> np.ndarray:
    return np.clip(np.rint(np.asarray(values, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_pgm(image, path) -> None:
    """Write a gray image as binary P5, rounding to nearest and clamping to [0, 255]."""
    img = as_gray(image)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(_quantize(img).tobytes())


def write_ppm(image, path) -> None:
    """Write a ``(h, w, 3)`` array as binary P6."""
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3:
        raise SizeError(f"RGB image must have shape (h, w, 3), got {img.shape}")
    h, w, _ = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(_quantize(img).tobytes())


# ---------------------------------------------------------------------------
# pixel operations

_LUMA = np.array([0.299, 0.587, 0.114])


def to_grayscale(img) -> np.ndarray:
    """BT.601 luma, kept as float (no rounding)."""
    rgb = np.asarray(img)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise SizeError(f"RGB image must have shape (h, w, 3), got {rgb.shape}")
    rgb = rgb.astype(np.float64)
    return rgb[..., 0] * _LUMA[0] + rgb[..., 1] * _LUMA[1] + rgb[..., 2] * _LUMA[2]


def ensure_gray(img) -> np.ndarray:
    """Return ``img`` as a gray image, converting RGB input if necessary."""
    arr = np.asarray(img)
    if arr.ndim == 3:
        return to_grayscale(arr)
    return as_gray(arr)


def linear_weights(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two-tap interpolation taps for one axis of a bilinear resize.

    Output sample ``k`` equals ``src[lo[k]] + frac[k] * (src[hi[k]] - src[lo[k]])``
    with pixel-centre alignment and edge clamping.
    """
    pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    pos = np.clip(pos, 0.0, n_in - 1)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = pos - lo
    return lo, hi, frac


def resize_bilinear(img, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resize with pixel-centre mapping ``src = (dst + 0.5) * in / out - 0.5``."""
    src = as_gray(img)
    if out_w < 1 or out_h < 1:
        raise SizeError(f"output size must be >= 1, got {out_w}x{out_h}")
    h, w = src.shape
    if (h, w) == (out_h, out_w):
        return src.copy()
    lo, hi, fr = linear_weights(w, out_w)
    # a + t*(b - a) keeps constants exact
    rows = src[:, lo] + (src[:, hi] - src[:, lo]) * fr
    lo, hi, fr = linear_weights(h, out_h)
    return rows[lo, :] + (rows[hi, :] - rows[lo, :]) * fr[:, None]


def crop(img, r: Rect) -> np.ndarray:
    """Copy the pixels under ``r``; raises BoundsError if ``r`` leaves the image."""
    arr = np.asarray(img)
    h, w = arr.shape[:2]
    if not r.inside(w, h):
        raise BoundsError(f"rect {r.as_tuple()} outside {w}x{h} image")
    return arr[r.y:r.y2, r.x:r.x2].copy()


def image_size(img) -> tuple[int, int]:
    """``(width, height)`` of an image array."""
    shape = np.shape(img)
    return shape[1], shape[0]
