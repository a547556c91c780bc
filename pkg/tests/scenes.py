"""Seeded synthetic scenes for scanner tests."""

import numpy as np

from eyemouth.imgio import resize_bilinear
from oracles import smooth_field


def planted_scene(rng, w=512, h=768, size=10):
    """Smooth background with one smooth patch pasted in.

    Returns (image, template, x, y, pw, ph); the template is the pasted
    patch resized to ``size``, so the planted position scores 1.
    """
    img = smooth_field(rng, h, w, 3.0, 400.0)
    pw = int(rng.integers(30, 61))
    ph = int(rng.integers(24, 51))
    patch = smooth_field(rng, ph, pw, 2.5, 500.0)
    x = int(rng.integers(0, w - pw + 1))
    y = int(rng.integers(0, h - ph + 1))
    img[y:y + ph, x:x + pw] = patch
    return img, resize_bilinear(patch, size, size), x, y, pw, ph
