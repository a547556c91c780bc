"""Independent reference implementations used as test oracles.

Nothing here calls into ``eyemouth`` resampling or scanning code: the
resize goes through ``scipy.ndimage.map_coordinates`` and the scanner is a
plain double loop.
"""

import math

import numpy as np
from scipy import ndimage


def centre_coords(n_in, n_out):
    """Source coordinate of each output pixel centre, clamped to the image."""
    return np.clip((np.arange(n_out) + 0.5) * n_in / n_out - 0.5, 0, n_in - 1)


def oracle_resize(img, out_w, out_h):
    img = np.asarray(img, dtype=float)
    h, w = img.shape
    ys = centre_coords(h, out_h)
    xs = centre_coords(w, out_w)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return ndimage.map_coordinates(img, [yy, xx], order=1, mode="nearest")


def oracle_ncc(f, t):
    f = np.asarray(f, dtype=float).ravel()
    t = np.asarray(t, dtype=float).ravel()
    fd = f - f.mean()
    td = t - t.mean()
    sf = float(fd @ fd)
    st = float(td @ td)
    # zero-variance rule, same relative threshold as the library contract
    if sf <= 1e-20 * float(f @ f) or st <= 1e-20 * float(t @ t):
        return 0.0
    return max(-1.0, min(1.0, float(fd @ td) / math.sqrt(sf * st)))


def brute_force_scan(img, region, pw, ph, template, tie_atol=1e-12):
    """(score, x, y) of the best patch.

    The first row-major position scoring within ``tie_atol`` of the
    maximum wins.
    """
    img = np.asarray(img, dtype=float)
    t = np.asarray(template, dtype=float)
    n = t.shape[0]
    rx, ry, rw, rh = region
    scored = []
    for y in range(ry, ry + rh - ph + 1):
        for x in range(rx, rx + rw - pw + 1):
            window = oracle_resize(img[y:y + ph, x:x + pw], n, n)
            scored.append((oracle_ncc(window, t), x, y))
    top = max(s for s, _, _ in scored)
    return next(r for r in scored if r[0] >= top - tie_atol)


def mean_of_resized(crops, size):
    acc = np.zeros((size, size))
    for c in crops:
        acc += oracle_resize(c, size, size)
    return acc / len(crops)


def smooth_field(rng, h, w, sigma, amp, base=128.0):
    return base + ndimage.gaussian_filter(rng.normal(0.0, 1.0, (h, w)), sigma) * amp
