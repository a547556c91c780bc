"""Horizontal Haar preprocessing and block-mean image pyramids."""

from __future__ import annotations

import numpy as np

from .imgio import SizeError, as_gray


def haar_horizontal(img) -> np.ndarray:
    """Undecimated single-level horizontal Haar sub-band.

    Rows are low-passed with the pair average ``(f[x] + f[x+1]) / 2``,
    then columns are high-passed with ``(a[y] - a[y+1]) / 2``. Borders
    are edge-replicated so the output has the input's shape. Horizontal
    edges (eye slits, brows, lips) survive; vertical structure cancels.

    Parameters
    ----------
    img : array_like, shape (h, w)
        Gray image with ``h >= 2`` and ``w >= 2``.

    Returns
    -------
    ndarray, shape (h, w)
        Signed detail coefficients.
    """
    f = as_gray(img)
    h, w = f.shape
    if h < 2 or w < 2:
        raise SizeError(f"haar_horizontal needs at least 2x2 pixels, got {w}x{h}")
    right = np.concatenate([f[:, 1:], f[:, -1:]], axis=1)
    a = (f + right) / 2.0
    below = np.concatenate([a[1:, :], a[-1:, :]], axis=0)
    return (a - below) / 2.0


def _block_sums(axis_len: int) -> np.ndarray:
    """0/1 matrix summing 2:1 blocks along one axis (floor length).

    An odd trailing row/column is folded into the last block, which then
    spans three source samples.
    """
    n_out = axis_len // 2
    m = np.zeros((n_out, axis_len))
    for k in range(n_out):
        m[k, 2 * k:2 * k + 2] = 1.0
    if axis_len % 2:
        m[-1, -1] = 1.0
    return m


def downsample(img) -> np.ndarray:
    """One 2x2 block-mean reduction (floor dimensions)."""
    f = as_gray(img)
    h, w = f.shape
    if h < 2 or w < 2:
        raise SizeError(f"cannot halve a {w}x{h} image")
    if h % 2 == 0 and w % 2 == 0:
        return (f[0::2, 0::2] + f[1::2, 0::2] + f[0::2, 1::2] + f[1::2, 1::2]) / 4.0
    my = _block_sums(h)
    mx = _block_sums(w)
    counts = np.outer(my.sum(axis=1), mx.sum(axis=1))
    return (my @ f @ mx.T) / counts


def build_pyramid(img, min_dim: int = 20) -> list[np.ndarray]:
    """Stack of successively halved images, level 0 at full resolution.

    Halving stops before a level whose smaller side would fall below
    ``min_dim``.
    """
    f = as_gray(img)
    if min_dim < 2:
        raise ValueError(f"min_dim must be >= 2, got {min_dim}")
    if min(f.shape) < min_dim:
        raise SizeError(f"image {f.shape[1]}x{f.shape[0]} smaller than min_dim {min_dim}")
    levels = [f]
    while min(levels[-1].shape) // 2 >= min_dim:
        levels.append(downsample(levels[-1]))
    return levels
