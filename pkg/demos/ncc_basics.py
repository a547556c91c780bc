"""
Correlation scores and a pixel-by-pixel scan
============================================

Scores a few windows against a template, then finds a pasted copy of the
template in a noisy image.
"""

import numpy as np

from eyemouth import Rect, ncc, resize_bilinear, scan_region

rng = np.random.default_rng(0)
template = rng.normal(size=(10, 10))

# a window always matches itself
print("self:", ncc(template, template))

# brightness and contrast do not matter, polarity does
print("2*t + 17:", ncc(2 * template + 17, template))
print("-t:", ncc(-template, template))

# a flat window has no variance to correlate with
print("flat:", ncc(np.full((10, 10), 80.0), template))

###############################################################################
# Paste a 30x24 patch into a noise image and scan for it. Each candidate
# patch is resized to 10x10 before scoring.

img = rng.uniform(0, 255, size=(120, 160))
patch = rng.uniform(0, 255, size=(24, 30))
img[41:65, 77:107] = patch

t = resize_bilinear(patch, 10, 10)
r = scan_region(img, Rect(0, 0, 160, 120), 30, 24, t)
print("found at", (r.patch.x, r.patch.y), "score %.6f" % r.score)  # (77, 41)
